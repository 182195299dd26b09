"""Oracle-vs-algorithm gap for the threshold mechanism as the prior grid gets finer."""

import argparse

from rentmech import threshold
from rentmech.cost import over_time_cost_fn
from rentmech.dist import Uniform
from rentmech.oracle import DiscreteSetting, brute_force_menu, discrete_value, discretization_bound
from rentmech.reward import RewardFn


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--ks", type=int, nargs="+", default=[4, 6, 8])
    args = p.parse_args()
    d, g = Uniform(0.0, 1.0), RewardFn.consumer_surplus()
    plan = threshold.precompute_threshold(args.n, d, g, analytic=True)
    for k in args.ks:
        grid = d.discretize(k)
        s = DiscreteSetting(grid, args.n, DiscreteSetting.default_levels(grid), g,
                            over_time_cost_fn(plan.R, args.n))
        res = brute_force_menu(s)
        alg = discrete_value(threshold.as_menu(plan, args.n), s)
        print(f"k={k:2d} oracle={res.reward:.6f} algorithm={alg:.6f} "
              f"gap={res.reward - alg:+.6f} bound={discretization_bound(k, args.n):.4f} nodes={res.nodes}")


if __name__ == "__main__":
    main()
