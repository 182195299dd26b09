"""Fixed-rate rental: per-horizon allocation intervals over ironed virtual
values, Myerson totals split evenly across days, and the reward table.

At horizon ``h`` the allocation maximizes ``psi_h(v) * x - c_h(x)`` where
``psi_h`` is the ironed fixed-rate virtual value and ``c_h`` the over-time
cost.  Intervals are first built in virtual-value space by extending the
previous horizon's intervals one unit up, then mapped back to valuations with
``sup_inverse``.  That mapping sends every valuation on a flat (ironed)
stretch sitting exactly at a breakpoint to the smaller allocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cost import CostFn, RewardTable, over_time_cost_fn
from .dist import Distribution
from .errors import InvariantError
from .ironing import DEFAULT_GRID, IronedFn, iron
from .reward import RewardFn, fr_virtual_value
from .swac import FiniteMenuSwac, MenuEntry, PaymentSchedule

OPT_TOL = 1e-9


@dataclass(frozen=True)
class Interval:
    """One allocation level at one horizon.

    ``left``/``right`` bound the virtual values (``right`` may be inf);
    ``v_left``/``v_right`` are the matching valuations.
    """

    left: float
    right: float
    alloc: int
    v_left: float
    v_right: float
    prob: float
    total: float = 0.0

    def schedule(self) -> PaymentSchedule:
        return PaymentSchedule.fixed_rate(self.alloc, self.total)


@dataclass(frozen=True, eq=False)
class HorizonPlan:
    horizon: int
    dist: Distribution
    ironed: IronedFn
    cost: CostFn
    intervals: tuple[Interval, ...]  # sorted by alloc, prob > 0 only

    def locate(self, v: float) -> Interval | None:
        d = self.dist
        if v < d.lo - 1e-12 or v > d.hi + 1e-12:
            raise ValueError(f"valuation {v} outside [{d.lo}, {d.hi}]")
        for J in self.intervals:
            if J.v_left <= v < J.v_right or (v >= J.v_right == d.hi and J is self.intervals[-1]):
                return J
        return None

    def alloc_at(self, v: float) -> int:
        J = self.locate(v)
        return 0 if J is None else J.alloc


@dataclass(frozen=True, eq=False)
class FixedRatePlans:
    plans: tuple[HorizonPlan, ...]  # plans[h-1] is horizon h
    R: RewardTable
    g: RewardFn

    @property
    def n(self) -> int:
        return len(self.plans)

    def plan(self, h: int) -> HorizonPlan:
        return self.plans[h - 1]


def _per_horizon(n: int, ds) -> list[Distribution]:
    """Distributions indexed so that ``out[h-1]`` is D_h.  ``ds`` may be a
    single distribution or a sequence ordered D_n, ..., D_1."""
    if isinstance(ds, Distribution):
        return [ds] * n
    ds = list(ds)
    if len(ds) != n:
        raise ValueError(f"need {n} per-horizon distributions, got {len(ds)}")
    return ds[::-1]


def virtual_intervals(R: Sequence[float], h: int, prev: Sequence[tuple[float, float, int]]):
    """Virtual-space intervals (left, right, alloc) at horizon ``h``.

    ``prev`` holds horizon ``h-1``'s intervals.  Allocation ``i+1`` beats
    allocation 1 once y * i >= c(i+1) = R[h-1] - R[h-i-1]; every comparison
    among allocations >= 2 is inherited from horizon ``h-1`` shifted by one.
    """
    rh1 = R[h - 1]
    last_right = min([(rh1 - R[h - x]) / (x - 1) for x in range(2, h + 1)] + [math.inf])
    out = [(0.0, last_right, 1)]
    by_alloc = {a: (lft, rgt) for lft, rgt, a in prev}
    for i in range(1, h):
        if i not in by_alloc:
            continue
        j_left, j_right = by_alloc[i]
        lft = max(j_left, (rh1 - R[h - i - 1]) / i, last_right)
        if lft < j_right:
            out.append((lft, j_right, i + 1))
            last_right = j_right
    return out


def _plan_horizon(h: int, d: Distribution, ironed: IronedFn, R: list[float], g: RewardFn,
                  vint, normalize_base_payment: bool) -> tuple[HorizonPlan, float]:
    cost = over_time_cost_fn(R, h)
    t = lambda y: d.hi if math.isinf(y) else ironed.sup_inverse(y)  # noqa: E731
    intervals: list[Interval] = []
    pay, prev_alloc, value = 0.0, 0, 0.0
    for lft, rgt, alloc in vint:
        vl, vr = t(lft), t(rgt)
        prob = d.interval_prob(vl, vr) if vr > vl else 0.0
        if prob <= 0:
            continue
        if normalize_base_payment and not intervals and g.payment_coef < 0:
            prev_alloc = alloc
        pay += vl * (alloc - prev_alloc)
        prev_alloc = alloc
        psi_mean = ironed.cond_mean(vl, vr)
        value += prob * (psi_mean * alloc + R[h - alloc])
        intervals.append(Interval(lft, rgt, alloc, vl, vr, prob, pay))
    allocated = sum(J.prob for J in intervals)
    value += (1.0 - allocated) * R[h - 1]
    if normalize_base_payment and intervals and g.payment_coef < 0:
        # payments were lowered by the first threshold times its allocation
        first = intervals[0]
        offset = first.v_left * first.alloc
        value -= g.payment_coef * offset * allocated
    return HorizonPlan(h, d, ironed, cost, tuple(intervals)), value


def check_pointwise_optimal(plan: HorizonPlan, grid: int = 10_000, tol: float = OPT_TOL) -> None:
    """Raise InvariantError unless the plan's allocation maximizes
    psi(v) * x - c(x) over x = 0..h at every grid valuation."""
    d, h = plan.dist, plan.horizon
    q = (np.arange(grid) + 0.5) / grid
    v = np.asarray(d.quantile(q), dtype=float)
    psi = np.asarray(plan.ironed(v), dtype=float)
    xs = np.arange(h + 1)
    obj = psi[:, None] * xs[None, :] - np.asarray(plan.cost.values)[None, :]
    chosen = np.array([plan.alloc_at(float(x)) for x in v])
    got = obj[np.arange(grid), chosen]
    best = obj.max(axis=1)
    bad = np.nonzero(got < best - tol * np.maximum(1.0, np.abs(best)))[0]
    if len(bad):
        k = bad[0]
        raise InvariantError(f"horizon {h}: allocation {chosen[k]} at v={v[k]} is not a pointwise "
                             f"maximizer (objective {got[k]} < {best[k]})")


def check_contiguous(plan: HorizonPlan, tol: float = 1e-9) -> None:
    for a, b in zip(plan.intervals, plan.intervals[1:]):
        if abs(a.v_right - b.v_left) > tol:
            raise InvariantError(f"horizon {plan.horizon}: valuation gap between allocations "
                                 f"{a.alloc} and {b.alloc}")
        if b.alloc <= a.alloc:
            raise InvariantError(f"horizon {plan.horizon}: allocations not increasing")


def precompute_fixed_rate(n: int, ds, g: RewardFn, m: int = DEFAULT_GRID,
                          normalize_base_payment: bool = False,
                          validate: bool = True) -> FixedRatePlans:
    """Plans for horizons 1..n and the reward table R[0..n]."""
    if n < 1:
        raise ValueError("horizon must be >= 1")
    per_h = _per_horizon(n, ds)
    cache: dict = {}
    R = [0.0]
    plans = []
    prev: list[tuple[float, float, int]] = []
    for h in range(1, n + 1):
        d = per_h[h - 1]
        ironed = cache.get(d)
        if ironed is None:
            ironed = iron(lambda v, d=d: fr_virtual_value(g, d, v), d, m)
            cache[d] = ironed
        vint = virtual_intervals(R, h, prev)
        plan, value = _plan_horizon(h, d, ironed, R, g, vint, normalize_base_payment)
        if validate:
            check_contiguous(plan)
            check_pointwise_optimal(plan, grid=min(m, 10_000))
        R.append(value)
        plans.append(plan)
        prev = vint
    return FixedRatePlans(tuple(plans), RewardTable(tuple(R)), g)


def run_fixed_rate_auction(plan: HorizonPlan, v: float) -> tuple[int, PaymentSchedule]:
    J = plan.locate(v)
    if J is None:
        return 0, PaymentSchedule(())
    return J.alloc, J.schedule()


def as_menu(plan: HorizonPlan) -> FiniteMenuSwac:
    """Valuation-space menu; an unallocated bottom region becomes an alloc-0 entry."""
    d = plan.dist
    entries = []
    if not plan.intervals:
        return FiniteMenuSwac(plan.horizon, (MenuEntry(d.lo, d.hi, 0, PaymentSchedule(())),))
    first = plan.intervals[0]
    if first.v_left > d.lo:
        entries.append(MenuEntry(d.lo, first.v_left, 0, PaymentSchedule(())))
    for J in plan.intervals:
        entries.append(MenuEntry(J.v_left, J.v_right, J.alloc, J.schedule()))
    return FiniteMenuSwac(plan.horizon, tuple(entries))


def myerson_residuals(plan: HorizonPlan) -> list[float]:
    """|p_i - p_{i-1} - (x_i - x_{i-1}) * t_i| for consecutive intervals; the
    first interval is measured against the unallocated bottom."""
    out = []
    prev_total, prev_alloc = 0.0, 0
    for k, J in enumerate(plan.intervals):
        if k == 0 and J.total == 0.0 and J.v_left > plan.dist.lo:
            # normalized base payment: the first charge is dropped by design
            prev_total, prev_alloc = 0.0, J.alloc
            continue
        out.append(abs(J.total - prev_total - (J.alloc - prev_alloc) * J.v_left))
        prev_total, prev_alloc = J.total, J.alloc
    return out


def rental_mechanism(plans: FixedRatePlans):
    from .sim import RentalMechanism

    return RentalMechanism(tuple(as_menu(plans.plan(h)) for h in range(plans.n, 0, -1)),
                           plans.g, name="fixed_rate")
