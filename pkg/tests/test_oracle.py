import itertools

import numpy as np
import pytest

from rentmech import threshold as th
from rentmech.cost import CostFn, over_time_cost_fn
from rentmech.dist import DiscreteGrid, Uniform
from rentmech.errors import SizeBoundError
from rentmech.ironing import iron
from rentmech.oracle import (DiscreteSetting, brute_force_menu, discrete_value, discretization_bound,
                             dp_virtual_welfare, enumerate_options)
from rentmech.reward import RewardFn, fr_virtual_value, horizon_virtual_value
from rentmech.swac import FiniteMenuSwac, MenuEntry, designer_reward

U = Uniform(0.0, 1.0)
CS = RewardFn.consumer_surplus()


def _naive(s: DiscreteSetting) -> float:
    """Every subset of options as a menu, scored by best response."""
    opts = enumerate_options(s)
    pts = s.grid.points
    best = 0.0
    for r in range(1, len(opts) + 1):
        for subset in itertools.combinations(opts, r):
            entries = []
            width = 1.0 / len(subset)
            for i, o in enumerate(subset):
                entries.append(MenuEntry(i * width, (i + 1) * width, o.alloc, o.schedule()))
            menu = FiniteMenuSwac(s.n, tuple(entries))
            val = sum(m * designer_reward(menu, s.g, s.c, x) for m, x in zip(s.grid.masses, pts))
            best = max(best, val)
    return best


def test_two_point_revenue():
    s = DiscreteSetting(DiscreteGrid((0.25, 0.75), (0.5, 0.5)), 1, (0.0, 0.25, 0.75),
                        RewardFn.revenue(), CostFn.zero(1))
    res = brute_force_menu(s)
    assert res.reward == pytest.approx(max(0.5 * 0.75, 1.0 * 0.25))
    assert res.assignment[0] is None and res.assignment[1].total == 0.75


@pytest.mark.parametrize("g", [RewardFn.revenue(), CS, RewardFn.linear(1.0, 0.5)])
def test_matches_naive_enumeration(g):
    grid = DiscreteGrid((0.2, 0.5, 0.9), (0.3, 0.3, 0.4))
    s = DiscreteSetting(grid, 2, (0.0, 0.2, 0.5), g, CostFn((0.0, 0.0, 0.3)))
    assert brute_force_menu(s).reward == pytest.approx(_naive(s), abs=1e-12)


def test_consumer_surplus_allocates_everyone():
    plan = th.precompute_threshold(3, U, CS, analytic=True)
    grid = U.discretize(6)
    s = DiscreteSetting(grid, 3, DiscreteSetting.default_levels(grid), CS, over_time_cost_fn(plan.R, 3))
    res = brute_force_menu(s)
    assert all(o is not None and o.alloc >= 1 for o in res.assignment)


def test_welfare_allocates_everything_free():
    grid = U.discretize(4)
    s = DiscreteSetting(grid, 2, DiscreteSetting.default_levels(grid), RewardFn.welfare(), CostFn.zero(2))
    res = brute_force_menu(s)
    assert all(o.alloc == 2 and o.total == 0.0 for o in res.assignment)
    assert res.reward == pytest.approx(2 * np.mean(grid.points))


def test_size_bound():
    grid = U.discretize(13)
    s = DiscreteSetting(grid, 2, (0.0, 0.5), CS, CostFn.zero(2))
    with pytest.raises(SizeBoundError, match="menus"):
        brute_force_menu(s)


def test_gap_shrinks_with_k():
    n = 4
    plan = th.precompute_threshold(n, U, CS, analytic=True)
    gaps = []
    for k in (4, 8, 12):
        grid = U.discretize(k)
        s = DiscreteSetting(grid, n, DiscreteSetting.default_levels(grid), CS, over_time_cost_fn(plan.R, n))
        res = brute_force_menu(s)
        alg = discrete_value(th.as_menu(plan, n), s)
        assert abs(res.reward - alg) <= discretization_bound(k, n)
        gaps.append(abs(res.reward - alg))
    assert gaps[0] > gaps[1] > gaps[2]


def test_oracle_dominates_when_levels_contain_the_threshold():
    plan = th.precompute_threshold(4, U, CS, analytic=True)
    grid = U.discretize(8)
    levels = DiscreteSetting.default_levels(grid)[:-1] + (plan.tau[4],)
    s = DiscreteSetting(grid, 4, levels, CS, over_time_cost_fn(plan.R, 4))
    alg = discrete_value(th.as_menu(plan, 4), s)
    assert brute_force_menu(s).reward >= alg - 1e-12


def test_dp_virtual_welfare_examples():
    from rentmech import fixed_rate as fr

    plans = fr.precompute_fixed_rate(5, U, CS)
    psi = iron(lambda v: fr_virtual_value(CS, U, v), U)
    _, alloc = dp_virtual_welfare(psi, U, over_time_cost_fn(plans.R, 5))
    assert np.all(alloc == 1)

    plan = th.precompute_threshold(4, U, CS, analytic=True)
    psi4 = iron(lambda v: horizon_virtual_value(CS, U, 4, v), U)
    v, alloc = dp_virtual_welfare(psi4, U, over_time_cost_fn(plan.R, 4))
    assert np.all(alloc[v < 0.4999] == 1) and np.all(alloc[v > 0.5001] == 4)

    v, alloc = dp_virtual_welfare(lambda v: v + 1.0, U, CostFn.zero(3))
    assert np.all(alloc == 3)
