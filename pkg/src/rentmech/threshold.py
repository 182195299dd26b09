"""One-or-all threshold auctions for negative-tradeoff rewards with i.i.d. agents.

At horizon ``h >= 2`` an agent either rents one day for free or takes all
``h`` remaining days, paying the threshold ``tau_h`` up front.  The threshold
is the ironed horizon-specific virtual value's inverse at ``R[h-1]/(h-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cost import RewardTable, over_time_cost_fn
from .dist import Distribution, Uniform, same_distribution
from .errors import NotIIDError, RewardClassError
from .ironing import DEFAULT_GRID, IronedFn, iron
from .reward import NEGATIVE, RewardFn, horizon_virtual_value
from .swac import FiniteMenuSwac, MenuEntry, PaymentSchedule


class UniformLinearIroned:
    """Closed-form ironing of a linear virtual value on a uniform prior.

    The horizon-specific virtual value on Uniform[lo, hi] is affine in v; when
    its slope is negative ironing flattens it to its mean.
    """

    def __init__(self, d: Uniform, g: RewardFn, h: int):
        # g(v, phi/(h-1)) with phi(v) = 2v - hi
        a, b = g.alpha, g.beta
        self.dist = d
        self.slope = a + 2.0 * b / (h - 1)
        self.intercept = -b * d.hi / (h - 1)
        self.flat = self.slope <= 0
        self.level = self.slope * 0.5 * (d.lo + d.hi) + self.intercept

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        out = np.full_like(v, self.level) if self.flat else self.slope * v + self.intercept
        return float(out) if out.ndim == 0 else out

    def sup_inverse(self, y: float) -> float:
        d = self.dist
        if self.flat:
            return d.hi if self.level <= y else d.lo
        return float(min(max((y - self.intercept) / self.slope, d.lo), d.hi))


@dataclass(frozen=True, eq=False)
class ThresholdPlan:
    n: int
    dist: Distribution
    g: RewardFn
    tau: tuple[float, ...]  # tau[h] for h = 0..n; tau[0], tau[1] unused (nan)
    R: RewardTable
    ironed: tuple = field(repr=False)  # ironed[h], None for h < 2

    def sells_all(self, h: int, v: float) -> bool:
        if h < 2:
            return False
        t = self.tau[h]
        return t < self.dist.hi and v >= t

    def targets(self, h: int) -> float:
        return self.R[h - 1] / (h - 1)


def _check_inputs(ds, g: RewardFn) -> Distribution:
    if g.kind != NEGATIVE:
        raise RewardClassError(f"threshold mechanism needs a negative-tradeoff reward, got {g.kind}")
    if isinstance(ds, Distribution):
        return ds
    ds = list(ds)
    if not ds or not same_distribution(ds):
        raise NotIIDError("threshold mechanism requires i.i.d. agents (one shared distribution)")
    return ds[0]


def precompute_threshold(n: int, ds, g: RewardFn, m: int = DEFAULT_GRID,
                         analytic: bool = False) -> ThresholdPlan:
    """Thresholds tau_2..tau_n and rewards R[0..n].

    ``analytic=True`` uses closed-form ironing (uniform priors only) instead of
    the numeric grid.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    d = _check_inputs(ds, g)
    if analytic and not isinstance(d, Uniform):
        raise ValueError("the analytic path needs a uniform distribution")
    alpha, beta = g.alpha, -g.beta  # beta > 0 in g = alpha v - beta p
    R = [0.0, alpha * d.mean()]
    tau = [math.nan, math.nan]
    ironed: list = [None, None]
    for i in range(2, n + 1):
        if analytic:
            psi = UniformLinearIroned(d, g, i)
        else:
            psi = iron(lambda v, i=i: horizon_virtual_value(g, d, i, v), d, m)
        t = float(psi.sup_inverse(R[i - 1] / (i - 1)))
        below = d.interval_prob(d.lo, t)
        above = 1.0 - below
        r = 0.0
        if below > 0:
            r += (alpha * d.cond_mean(d.lo, t) + R[i - 1]) * below
        if above > 0 and t < d.hi:
            r += (alpha * i * d.cond_mean(t, d.hi) - beta * t) * above
        tau.append(t)
        R.append(r)
        ironed.append(psi)
    return ThresholdPlan(n, d, g, tuple(tau), RewardTable(tuple(R)), tuple(ironed))


def run_threshold_auction(plan: ThresholdPlan, h: int, v: float) -> tuple[int, PaymentSchedule]:
    if not 1 <= h <= plan.n:
        raise ValueError(f"horizon {h} outside 1..{plan.n}")
    if plan.sells_all(h, v):
        return h, PaymentSchedule((plan.tau[h],) + (0.0,) * (h - 1))
    return 1, PaymentSchedule((0.0,))


def as_menu(plan: ThresholdPlan, h: int) -> FiniteMenuSwac:
    d = plan.dist
    free = PaymentSchedule((0.0,))
    if h < 2 or plan.tau[h] >= d.hi:
        return FiniteMenuSwac(h, (MenuEntry(d.lo, d.hi, 1, free),))
    t = plan.tau[h]
    sell_all = MenuEntry(max(t, d.lo), d.hi, h, PaymentSchedule((t,) + (0.0,) * (h - 1)))
    if t <= d.lo:
        return FiniteMenuSwac(h, (sell_all,))
    return FiniteMenuSwac(h, (MenuEntry(d.lo, t, 1, free), sell_all))


def uniform_recurrence(n: int) -> tuple[list[float], list[float]]:
    """Closed-form thresholds and average rewards R_i / i for consumer surplus
    on Uniform[0, 1].  Index i of each list is horizon i (index 0 unused)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    taus = [math.nan, math.nan, 1.0, 1.0]
    ells = [math.nan, 0.5, 0.5, 0.5]
    for i in range(4, n + 1):
        prev = ells[i - 1]
        t = ((i - 1) * prev - 1.0) / (i - 3)
        t = min(max(t, 0.0), 1.0)
        ell = (t / (2 * i) + (i - 1) / i * prev) * t + ((t + 1) / 2 - t / i) * (1 - t)
        taus.append(t)
        ells.append(ell)
    return taus[: n + 1], ells[: n + 1]


@dataclass(frozen=True)
class ThresholdAudit:
    truthful: bool
    min_alloc_ok: bool
    avg_reward_monotone: bool
    one_or_all: bool
    details: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.truthful and self.min_alloc_ok and self.avg_reward_monotone and self.one_or_all


def audit_threshold_structure(plan: ThresholdPlan, grid: int = 1000, tol: float = 1e-9) -> ThresholdAudit:
    from .audit import audit_truthful

    details = []
    truthful = min_ok = one_or_all = True
    for h in range(1, plan.n + 1):
        menu = as_menu(plan, h)
        rep = audit_truthful(menu, grid)
        if not rep.ok:
            truthful = False
            details.append(f"horizon {h}: {len(rep.violations)} truthfulness violations")
        allocs = {e.alloc for e in menu.entries}
        if min(allocs) < 1:
            min_ok = False
            details.append(f"horizon {h}: some agent gets no unit")
        if not allocs <= {1, h}:
            one_or_all = False
            details.append(f"horizon {h}: allocations {sorted(allocs)} are not one-or-all")
    avg = [plan.R[i] / i for i in range(1, plan.n + 1)]
    mono = all(b >= a - tol for a, b in zip(avg, avg[1:]))
    if not mono:
        details.append("R[i]/i decreases somewhere")
    return ThresholdAudit(truthful, min_ok, mono, one_or_all, tuple(details))


def cost_at(plan: ThresholdPlan, h: int):
    return over_time_cost_fn(plan.R, h)


def rental_mechanism(plan: ThresholdPlan):
    from .sim import RentalMechanism

    return RentalMechanism(tuple(as_menu(plan, h) for h in range(plan.n, 0, -1)), plan.g,
                           name="threshold")
