"""Menu audits: truthfulness, allocation and reward monotonicity, and the
structural pairwise properties every truthful menu satisfies.

Each audit evaluates best responses on an evenly spaced valuation grid
covering the menu's support (endpoints included) and returns a report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cost import CostFn
from .reward import RewardFn
from .swac import EPS, BestResponse, FiniteMenuSwac, best_response, designer_reward

REWARD_TOL = 1e-9
UTIL_TOL = 1e-9


def _grid(m: FiniteMenuSwac, grid: int | np.ndarray) -> np.ndarray:
    if isinstance(grid, (int, np.integer)):
        if grid < 2:
            raise ValueError("audit grid needs at least 2 points")
        return np.linspace(m.lo, m.hi, int(grid))
    return np.asarray(grid, dtype=float)


@dataclass(frozen=True)
class TruthfulReport:
    grid: int
    violations: tuple[tuple[float, int, int | None], ...]  # (v, own entry, chosen)

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_truthful(m: FiniteMenuSwac, grid: int | np.ndarray = 1000) -> TruthfulReport:
    """No grid agent strictly gains by reporting another valuation.

    The agent's own outcome is its own entry, or walking away when that
    entry's filter shuts it out.  A best response with a different
    (alloc, total) is a violation only if it is strictly better, so exact
    indifference (e.g. at an interval boundary) is not flagged.
    """
    vs = _grid(m, grid)
    bad = []
    for v in vs:
        own = m.entry_index(float(v))
        br = best_response(m, float(v))
        e = m.entries[own]
        own_util = e.utility(float(v)) if own in br.feasible_set else 0.0
        if br.utility > own_util + UTIL_TOL * max(1.0, abs(own_util)):
            bad.append((float(v), own, br.chosen_entry))
    return TruthfulReport(len(vs), tuple(bad))


@dataclass(frozen=True)
class MonotoneReport:
    allocation_monotone: bool
    reward_monotone: bool
    allocation_witness: tuple[float, float] | None  # (w, v), w < v, alloc(w) > alloc(v)
    allocation_values: tuple[int, int] | None
    reward_witness: tuple[float, float] | None
    reward_values: tuple[float, float] | None


def _witness(vals: np.ndarray, vs: np.ndarray, tol: float):
    """Smallest v with some earlier w exceeding it, paired with the largest such w."""
    run_max = np.maximum.accumulate(vals)
    for j in range(1, len(vs)):
        if run_max[j - 1] > vals[j] + tol:
            ws = np.nonzero(vals[:j] > vals[j] + tol)[0]
            i = ws[-1]
            return (float(vs[i]), float(vs[j])), (vals[i], vals[j])
    return None, None


def audit_monotone(m: FiniteMenuSwac, g: RewardFn, c: CostFn | None,
                   grid: int | np.ndarray = 1000) -> MonotoneReport:
    vs = _grid(m, grid)
    brs = [best_response(m, float(v), g, c) for v in vs]
    allocs = np.array([b.alloc for b in brs], dtype=float)
    rewards = np.array([designer_reward(m, g, c, float(v)) for v in vs])
    aw, av = _witness(allocs, vs, 0.0)
    rw, rv = _witness(rewards, vs, REWARD_TOL)
    return MonotoneReport(
        aw is None, rw is None,
        aw, None if av is None else (int(av[0]), int(av[1])),
        rw, None if rv is None else (float(rv[0]), float(rv[1])),
    )


@dataclass(frozen=True)
class PropsReport:
    pairs_checked: int
    equal_alloc_violations: tuple = ()  # (w, v, total_w, total_v)
    benefit_violations: tuple = ()  # (w, v, i, j)
    filter_violations: tuple = ()  # (w, v)
    filter_witnesses: tuple = field(default=(), compare=False)  # (w, v, filter)

    @property
    def ok(self) -> bool:
        return not (self.equal_alloc_violations or self.benefit_violations or self.filter_violations)


def audit_props(m: FiniteMenuSwac, g: RewardFn | None = None, c: CostFn | None = None,
                grid: int | np.ndarray = 200, tol: float = 1e-9) -> PropsReport:
    """Pairwise structure on grid pairs w < v.

    * equal allocations: the lower type pays at least as much in total;
    * for options b, b' with x(b) > x(b'): u_w(b') - u_w(b) > u_v(b') - u_v(b);
    * whenever w gets more units than v, v's chosen option is filtered for w.
    """
    vs = _grid(m, grid)
    brs: list[BestResponse] = [best_response(m, float(v), g, c) for v in vs]
    alloc = np.array([b.alloc for b in brs])
    total = np.array([b.total for b in brs])
    filt = np.array([b.schedule.filter for b in brs])

    w_idx, v_idx = np.triu_indices(len(vs), k=1)
    eq = (alloc[w_idx] == alloc[v_idx]) & (total[w_idx] < total[v_idx] - tol)
    equal_bad = tuple((float(vs[i]), float(vs[j]), float(total[i]), float(total[j]))
                      for i, j in zip(w_idx[eq], v_idx[eq]))

    # benefit gap: the difference is (x(b) - x(b')) (v - w) > 0 for every option pair
    xs = np.array([e.alloc for e in m.entries] + [0], dtype=float)
    ps = np.array([e.total for e in m.entries] + [0.0])
    bi, bj = np.nonzero(xs[:, None] > xs[None, :])
    benefit_bad = []
    if len(bi):
        w, v = vs[w_idx][:, None], vs[v_idx][:, None]
        lhs = (xs[bj] * w - ps[bj]) - (xs[bi] * w - ps[bi])
        rhs = (xs[bj] * v - ps[bj]) - (xs[bi] * v - ps[bi])
        strict = v > w
        viol = (lhs <= rhs) & strict
        for r, k in zip(*np.nonzero(viol)):
            benefit_bad.append((float(w[r, 0]), float(v[r, 0]), int(bi[k]), int(bj[k])))

    flip = alloc[w_idx] > alloc[v_idx]
    filter_bad, witnesses = [], []
    for i, j in zip(w_idx[flip], v_idx[flip]):
        if filt[j] > vs[i] + EPS:
            witnesses.append((float(vs[i]), float(vs[j]), float(filt[j])))
        else:
            filter_bad.append((float(vs[i]), float(vs[j])))
    return PropsReport(len(w_idx), equal_bad, tuple(benefit_bad), tuple(filter_bad), tuple(witnesses))
