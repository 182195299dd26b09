"""Compare Monte-Carlo rewards with the analytic R[n] for a config.

    python3 scripts/mc_check.py configs/uniform_consumer_surplus.json
"""

import argparse

from rentmech import fixed_rate, threshold
from rentmech.config import load_config
from rentmech.sim import simulate


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("config")
    p.add_argument("--episodes", type=int)
    args = p.parse_args()
    cfg = load_config(args.config)
    if cfg.kind == "threshold":
        plan = threshold.precompute_threshold(cfg.horizon, cfg.shared, cfg.reward, cfg.ironing_grid,
                                              analytic=cfg.analytic)
        mech, R = threshold.rental_mechanism(plan), plan.R
    else:
        plans = fixed_rate.precompute_fixed_rate(cfg.horizon, cfg.shared, cfg.reward, cfg.ironing_grid,
                                                 cfg.normalize_base_payment)
        mech, R = fixed_rate.rental_mechanism(plans), plans.R
    res = simulate(mech, cfg.shared, cfg.seed, args.episodes or cfg.episodes)
    z = (res.mean - R[cfg.horizon]) / res.stderr
    print(f"analytic={R[cfg.horizon]:.6f} mc={res.mean:.6f} stderr={res.stderr:.2e} z={z:+.2f}")


if __name__ == "__main__":
    main()
