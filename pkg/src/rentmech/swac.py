"""Finite-menu stagewise auctions with seller cost (SWACs).

A menu is a list of adjacent valuation intervals, each mapped to an
allocation and a payment schedule.  Agents are stagewise individually
rational: they can only pick a schedule whose running average payment never
exceeds their valuation (its *filter*), and among those they maximize overall
utility ``alloc * v - total``.  Walking away (zero units, zero payment) is
always possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .cost import CostFn
from .dist import Distribution
from .errors import IRViolationError
from .reward import RewardFn

EPS = 1e-12


def payment_filter(payments: Sequence[float]) -> float:
    """Highest cumulative average payment; 0 for an empty schedule."""
    best, running = 0.0, 0.0
    for ell, p in enumerate(payments, start=1):
        running += p
        best = max(best, running / ell) if ell > 1 else running
    return best


@dataclass(frozen=True)
class PaymentSchedule:
    per_day: tuple[float, ...] = ()

    def __post_init__(self):
        vals = tuple(float(p) for p in self.per_day)
        object.__setattr__(self, "per_day", vals)
        if any(p < 0 for p in vals):
            raise ValueError("per-day payments must be nonnegative")

    @classmethod
    def canonical(cls, alloc: int, total: float, filter_: float) -> "PaymentSchedule":
        """Filter charged on day one, the rest of the total spread evenly."""
        if alloc == 0:
            if total != 0:
                raise ValueError("a zero allocation cannot carry a payment")
            return cls(())
        if alloc == 1:
            return cls((total,))
        if filter_ < total / alloc - EPS or filter_ > total + EPS:
            raise ValueError(f"filter {filter_} must lie in [total/alloc, total] = "
                             f"[{total / alloc}, {total}]")
        filter_ = min(max(filter_, total / alloc), total)
        rest = max((total - filter_) / (alloc - 1), 0.0)
        return cls((filter_,) + (rest,) * (alloc - 1))

    @classmethod
    def fixed_rate(cls, alloc: int, total: float) -> "PaymentSchedule":
        return cls((total / alloc,) * alloc) if alloc else cls(())

    @property
    def alloc(self) -> int:
        return len(self.per_day)

    @property
    def total(self) -> float:
        return float(sum(self.per_day))

    @property
    def filter(self) -> float:
        return payment_filter(self.per_day)


@dataclass(frozen=True)
class MenuEntry:
    left: float
    right: float
    alloc: int
    schedule: PaymentSchedule

    def __post_init__(self):
        if not self.left < self.right:
            raise ValueError(f"menu interval needs left < right, got [{self.left}, {self.right})")
        if self.alloc != self.schedule.alloc:
            raise ValueError("allocation must equal the schedule length")

    @property
    def total(self) -> float:
        return self.schedule.total

    @property
    def filter(self) -> float:
        return self.schedule.filter

    def utility(self, v: float) -> float:
        return self.alloc * v - self.total


@dataclass(frozen=True)
class FiniteMenuSwac:
    horizon: int
    entries: tuple[MenuEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("a menu needs at least one entry")
        for i, (a, b) in enumerate(zip(self.entries, self.entries[1:])):
            if abs(a.right - b.left) > EPS:
                raise ValueError(f"entries {i} and {i + 1} are not adjacent")
        for e in self.entries:
            if e.alloc > self.horizon:
                raise ValueError(f"allocation {e.alloc} exceeds horizon {self.horizon}")

    @property
    def lo(self) -> float:
        return self.entries[0].left

    @property
    def hi(self) -> float:
        return self.entries[-1].right

    def entry_index(self, v: float) -> int:
        """Index of the interval containing ``v`` (the last one is closed)."""
        if v < self.lo - EPS or v > self.hi + EPS:
            raise ValueError(f"valuation {v} outside [{self.lo}, {self.hi}]")
        for i, e in enumerate(self.entries):
            if v < e.right:
                return i
        return len(self.entries) - 1

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "entries": [
                {"left": e.left, "right": e.right, "alloc": e.alloc,
                 "total": e.total, "filter": e.filter}
                for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteMenuSwac":
        entries = []
        for e in data["entries"]:
            alloc = int(e["alloc"])
            total = float(e.get("total", 0.0))
            filt = float(e.get("filter", total / alloc if alloc else 0.0))
            entries.append(MenuEntry(float(e["left"]), float(e["right"]), alloc,
                                     PaymentSchedule.canonical(alloc, total, filt)))
        return cls(int(data["horizon"]), tuple(entries))


@dataclass(frozen=True)
class BestResponse:
    chosen_entry: int | None  # None = walked away
    utility: float
    feasible_set: tuple[int, ...]
    alloc: int
    schedule: PaymentSchedule

    @property
    def total(self) -> float:
        return self.schedule.total


_WALK_AWAY = PaymentSchedule(())


def _reward(g: RewardFn, c: CostFn | None, v: float, schedule: PaymentSchedule) -> float:
    return g.total(v, schedule.per_day) - (c(schedule.alloc) if c is not None else 0.0)


def best_response(m: FiniteMenuSwac, v: float, g: RewardFn | None = None,
                  c: CostFn | None = None, allow_outside: bool = True) -> BestResponse:
    """Utility-maximizing stagewise-IR choice of agent ``v``.

    Ties go to the higher designer reward (when ``g`` is given), then to the
    lower entry index; walking away ranks after every listed entry.
    """
    feasible = tuple(i for i, e in enumerate(m.entries) if e.filter <= v + EPS)
    if not feasible and not allow_outside:
        raise IRViolationError(f"no entry is affordable at v={v}")
    options = [(i, m.entries[i].utility(v), m.entries[i].schedule) for i in feasible]
    if allow_outside:
        options.append((None, 0.0, _WALK_AWAY))
    top = max(u for _, u, _ in options)
    tol = EPS * max(1.0, abs(top), abs(v) * m.horizon)
    tied = [o for o in options if o[1] >= top - tol]
    if g is not None and len(tied) > 1:
        best_r = max(_reward(g, c, v, s) for _, _, s in tied)
        tied = [o for o in tied if _reward(g, c, v, o[2]) >= best_r - tol]
    idx, util, sched = tied[0]
    return BestResponse(idx, util, feasible, sched.alloc, sched)


def designer_reward(m: FiniteMenuSwac, g: RewardFn, c: CostFn | None, v: float) -> float:
    """Net reward sum g(v, p_i) - c(alloc) at the agent's best response."""
    br = best_response(m, v, g, c)
    return _reward(g, c, v, br.schedule)


def breakpoints(m: FiniteMenuSwac, lo: float, hi: float) -> np.ndarray:
    """Valuations where the best response can change: filters and pairwise
    indifference points (including against walking away)."""
    pts = {lo, hi}
    opts = [(e.alloc, e.total) for e in m.entries] + [(0, 0.0)]
    pts.update(e.filter for e in m.entries)
    for (x1, p1), (x2, p2) in combinations(set(opts), 2):
        if x1 != x2:
            pts.add((p1 - p2) / (x1 - x2))
    return np.array(sorted(p for p in pts if lo <= p <= hi))


def response_regions(m: FiniteMenuSwac, lo: float, hi: float, g: RewardFn | None = None,
                     c: CostFn | None = None) -> list[tuple[float, float, BestResponse]]:
    """Partition [lo, hi] into intervals of constant best response, each
    classified at its midpoint."""
    bps = breakpoints(m, lo, hi)
    return [(a, b, best_response(m, 0.5 * (a + b), g, c))
            for a, b in zip(bps[:-1], bps[1:]) if b > a]


def expected_reward(m: FiniteMenuSwac, g: RewardFn, c: CostFn | None, d: Distribution) -> float:
    """E_v[net designer reward], integrated exactly region by region."""
    total = 0.0
    for a, b, br in response_regions(m, d.lo, d.hi, g, c):
        prob = d.interval_prob(a, b)
        if prob <= 0 or br.alloc == 0:
            continue
        if g.f_points is None:
            value = g.alpha * d.cond_mean(a, b)
        else:
            value = d.expect(g.value_part, a, b)
        net = br.alloc * value + g.payment_coef * br.total - (c(br.alloc) if c is not None else 0.0)
        total += prob * net
    return total


def example_1_1() -> FiniteMenuSwac:
    """Six days at 2 per day below 4; five days with 4 up front from 4 on."""
    return FiniteMenuSwac(6, (
        MenuEntry(0.0, 4.0, 6, PaymentSchedule((2.0,) * 6)),
        MenuEntry(4.0, 8.0, 5, PaymentSchedule((4.0, 0.0, 0.0, 0.0, 0.0))),
    ))
