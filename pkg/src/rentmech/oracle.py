"""Exhaustive ground truth on small discretized instances.

``brute_force_menu`` searches every menu built from a finite option set
(allocation, total payment, filter).  Any menu's outcome is reproduced by the
sub-menu of options its agents actually pick, and in that sub-menu each type
picks its own option.  So it suffices to enumerate type-to-option assignments
in which every type weakly prefers its assigned option to every other
assigned option it can afford (and to walking away).  The search assigns
types in increasing valuation order with branch and bound.  The winner is
re-scored with the ordinary best-response engine, so deviations are never
assumed away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cost import CostFn
from .dist import Distribution, DiscreteGrid
from .errors import SizeBoundError
from .reward import RewardFn
from .swac import EPS, FiniteMenuSwac, MenuEntry, PaymentSchedule, designer_reward

MAX_TYPES = 12
MAX_LEVELS = 13  # all grid points plus zero
MAX_HORIZON = 4


@dataclass(frozen=True)
class DiscreteSetting:
    grid: DiscreteGrid
    n: int
    payment_levels: tuple[float, ...]
    g: RewardFn
    c: CostFn

    def __post_init__(self):
        levels = tuple(sorted(set(float(p) for p in self.payment_levels)))
        object.__setattr__(self, "payment_levels", levels)
        if any(p < 0 for p in levels):
            raise ValueError("payment levels must be nonnegative")
        if self.c.horizon < self.n:
            raise ValueError("cost table shorter than the horizon")

    @classmethod
    def default_levels(cls, grid: DiscreteGrid) -> tuple[float, ...]:
        return (0.0,) + tuple(grid.points)


@dataclass(frozen=True)
class Option:
    alloc: int
    total: float
    filter: float

    def schedule(self) -> PaymentSchedule:
        return PaymentSchedule.canonical(self.alloc, self.total, self.filter)


def enumerate_options(s: DiscreteSetting) -> list[Option]:
    """(x, P, f) with P a level and f either P/x or a level in (P/x, P];
    filters between two grid points act identically, so duplicates by
    affordability pattern are dropped."""
    pts = np.asarray(s.grid.points)
    seen, out = set(), []
    for x in range(1, s.n + 1):
        for P in s.payment_levels:
            cands = [P / x] + [f for f in s.payment_levels if P / x < f <= P]
            for f in cands:
                key = (x, P, int(np.searchsorted(pts, f - EPS, side="left")))
                if key in seen:
                    continue
                seen.add(key)
                out.append(Option(x, P, f))
    return out


def _estimate(s: DiscreteSetting) -> int:
    return (len(enumerate_options(s)) + 1) ** len(s.grid)


def check_size(s: DiscreteSetting) -> None:
    k, L = len(s.grid), len(s.payment_levels)
    if k > MAX_TYPES or L > MAX_LEVELS or s.n > MAX_HORIZON:
        raise SizeBoundError(
            f"setting too large (types={k} <= {MAX_TYPES}, levels={L} <= {MAX_LEVELS}, "
            f"horizon={s.n} <= {MAX_HORIZON}); naive search space ~{_estimate(s):.3e} menus")


@dataclass(frozen=True)
class OracleResult:
    menu: FiniteMenuSwac
    reward: float
    assignment: tuple[Option | None, ...]  # per type, None = turned away
    nodes: int


def brute_force_menu(s: DiscreteSetting) -> OracleResult:
    check_size(s)
    v = np.asarray(s.grid.points, dtype=float)
    mass = np.asarray(s.grid.masses, dtype=float)
    k = len(v)
    opts = enumerate_options(s)
    # index 0 is walking away
    X = np.array([0] + [o.alloc for o in opts], dtype=float)
    P = np.array([0.0] + [o.total for o in opts])
    F = np.array([0.0] + [o.filter for o in opts])
    util = v[:, None] * X[None, :] - P[None, :]  # (k, O)
    feas = F[None, :] <= v[:, None] + EPS
    cost = np.array([s.c(int(x)) for x in X])
    a = np.asarray(s.g.value_part(v), dtype=float)
    reward = a[:, None] * X[None, :] + s.g.payment_coef * P[None, :] - cost[None, :]
    reward[:, 0] = 0.0
    tol = 1e-12
    allowed0 = feas & (util >= -tol)

    best = {"value": -math.inf, "assign": None}
    nodes = 0
    suffix_mass = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])

    def bound(mask, start):
        tot = 0.0
        for l in range(start, k):
            row = reward[l][mask[l]]
            if row.size == 0:
                return -math.inf
            tot += mass[l] * row.max()
        return tot

    def rec(t, mask, value, assign):
        nonlocal nodes
        nodes += 1
        if t == k:
            if value > best["value"] + 1e-15:
                best["value"], best["assign"] = value, list(assign)
            return
        if value + bound(mask, t) <= best["value"] + 1e-15:
            return
        cand = np.nonzero(mask[t])[0]
        cand = cand[np.argsort(-reward[t, cand], kind="stable")]
        for o in cand:
            # o must not beat any earlier type's pick for that type
            ok = True
            for j in range(t):
                oj = assign[j]
                if feas[j, o] and util[j, o] > util[j, oj] + tol:
                    ok = False
                    break
            if not ok:
                continue
            new_mask = mask.copy()
            if t + 1 < k:
                # later types must weakly prefer their pick to o when o is affordable
                fut = slice(t + 1, k)
                need = feas[fut, o][:, None] & (util[fut, :] < util[fut, o][:, None] - tol)
                new_mask[fut] &= ~need
                # and their pick must not tempt type t away from o
                tempt = feas[t] & (util[t] > util[t, o] + tol)
                new_mask[fut] &= ~tempt[None, :]
            assign.append(o)
            rec(t + 1, new_mask, value + mass[t] * reward[t, o], assign)
            assign.pop()

    rec(0, allowed0.copy(), 0.0, [])
    chosen = [None if o == 0 else opts[o - 1] for o in best["assign"]]
    menu = assignment_menu(s, chosen)
    value = float(sum(m * designer_reward(menu, s.g, s.c, float(x)) for m, x in zip(mass, v)))
    return OracleResult(menu, value, tuple(chosen), nodes)


def assignment_menu(s: DiscreteSetting, assign) -> FiniteMenuSwac:
    """Valuation-interval menu: type k's option covers [midpoint_{k-1,k}, midpoint_{k,k+1})."""
    pts = list(s.grid.points)
    lo = pts[0] - 0.5 * (pts[1] - pts[0]) if len(pts) > 1 else pts[0] - 0.5
    hi = pts[-1] + 0.5 * (pts[-1] - pts[-2]) if len(pts) > 1 else pts[0] + 0.5
    lo = max(lo, 0.0)
    edges = [lo] + [0.5 * (a + b) for a, b in zip(pts, pts[1:])] + [hi]
    entries = []
    for (l, r), o in zip(zip(edges, edges[1:]), assign):
        sched = PaymentSchedule(()) if o is None else o.schedule()
        entries.append(MenuEntry(l, r, sched.alloc, sched))
    return FiniteMenuSwac(s.n, tuple(entries))


def discrete_value(menu: FiniteMenuSwac, s: DiscreteSetting) -> float:
    """Expected designer reward of ``menu`` when the agent is drawn from the grid."""
    return float(sum(m * designer_reward(menu, s.g, s.c, float(x))
                     for m, x in zip(s.grid.masses, s.grid.points)))


def discretization_bound(k: int, n: int) -> float:
    return 2.0 * (1.0 / k) * n


def dp_virtual_welfare(psi: Callable, d: Distribution, c: CostFn, n: int | None = None,
                       grid: int = 10_000, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Smallest pointwise maximizer of psi(v) * x - c(x) on a quantile-midpoint grid."""
    n = c.horizon if n is None else n
    q = (np.arange(grid) + 0.5) / grid
    v = np.asarray(d.quantile(q), dtype=float)
    psi_v = np.asarray(psi(v), dtype=float)
    xs = np.arange(n + 1)
    obj = psi_v[:, None] * xs[None, :] - np.asarray(c.values[: n + 1])[None, :]
    best = obj.max(axis=1, keepdims=True)
    alloc = np.argmax(obj >= best - tol * np.maximum(1.0, np.abs(best)), axis=1)
    return v, alloc
