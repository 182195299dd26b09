"""Monte-Carlo rental game.

Each episode walks the days from horizon ``n`` down to 1.  An agent is
sampled every day, occupied or not, so two mechanisms run with the same seed
see the same agent stream.  A free asset is offered to that day's agent
through the horizon's SWAC; the agent best-responds and the asset stays busy
for the allocated days.

The batch path classifies valuations with per-horizon lookup tables built
from the best-response regions of each menu.  The scalar path (used for the
logged episodes) calls ``best_response`` directly, and the two are checked
against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import Distribution
from .errors import InvariantError
from .reward import RewardFn
from .swac import FiniteMenuSwac, best_response, response_regions

CHUNK = 1 << 16


@dataclass(frozen=True)
class RentalMechanism:
    swacs: tuple[FiniteMenuSwac, ...]  # horizons n, n-1, ..., 1
    g: RewardFn
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "swacs", tuple(self.swacs))
        n = len(self.swacs)
        for i, m in enumerate(self.swacs):
            if m.horizon != n - i:
                raise ValueError(f"SWAC {i} has horizon {m.horizon}, expected {n - i}")

    @property
    def n(self) -> int:
        return len(self.swacs)

    def swac(self, h: int) -> FiniteMenuSwac:
        return self.swacs[self.n - h]

    def to_dict(self) -> dict:
        return {"name": self.name, "reward": self.g.to_config(),
                "swacs": [m.to_dict() for m in self.swacs]}

    @classmethod
    def from_dict(cls, data: dict) -> "RentalMechanism":
        from .reward import from_config

        return cls(tuple(FiniteMenuSwac.from_dict(m) for m in data["swacs"]),
                   from_config(data["reward"], "reward"), data.get("name", "custom"))


@dataclass(frozen=True)
class DayRecord:
    day: int  # 1-based calendar day
    horizon: int  # days left including this one
    arrival_valuation: float
    available: bool
    alloc: int  # units granted to today's arrival (0 when busy or turned away)
    renter_valuation: float  # nan on idle days
    payment: float


@dataclass(frozen=True)
class RunLog:
    records: tuple[DayRecord, ...]
    total_reward: float
    g: RewardFn = field(repr=False)


@dataclass(frozen=True)
class SimResult:
    mean: float
    stderr: float
    episodes: int
    logs: tuple[RunLog, ...]
    rewards: np.ndarray = field(repr=False)


def _per_day(n: int, ds) -> list[Distribution]:
    """out[j] is the distribution for calendar day j+1 (horizon n-j)."""
    if isinstance(ds, Distribution):
        return [ds] * n
    ds = list(ds)
    if len(ds) != n:
        raise ValueError(f"need {n} per-horizon distributions, got {len(ds)}")
    return ds


@dataclass(frozen=True, eq=False)
class _Table:
    edges: np.ndarray  # interior breakpoints
    alloc: np.ndarray
    total: np.ndarray


def _table(m: FiniteMenuSwac, d: Distribution, g: RewardFn) -> _Table:
    regions = response_regions(m, d.lo, d.hi, g, None)
    edges = np.array([b for _, b, _ in regions[:-1]])
    return _Table(edges, np.array([br.alloc for *_, br in regions]),
                  np.array([br.total for *_, br in regions]))


def _run_scalar(mech: RentalMechanism, vs: np.ndarray) -> RunLog:
    n, g = mech.n, mech.g
    recs = []
    busy_until, renter, sched, start = 0, math.nan, (), 0
    total = 0.0
    for j in range(n):
        h = n - j
        v = float(vs[j])
        if j < busy_until:
            p = sched[j - start]
            recs.append(DayRecord(j + 1, h, v, False, 0, renter, p))
            total += g.eval(renter, p)
            continue
        br = best_response(mech.swac(h), v, g)
        if br.alloc == 0:
            recs.append(DayRecord(j + 1, h, v, True, 0, math.nan, 0.0))
            continue
        busy_until, renter, sched, start = j + br.alloc, v, br.schedule.per_day, j
        recs.append(DayRecord(j + 1, h, v, True, br.alloc, v, sched[0]))
        total += g.eval(v, sched[0])
    return RunLog(tuple(recs), float(total), g)


def simulate(mech: RentalMechanism, ds, seed: int, episodes: int,
             log_episodes: int = 3) -> SimResult:
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    n, g = mech.n, mech.g
    days = _per_day(n, ds)
    tables = [_table(mech.swac(n - j), days[j], g) for j in range(n)]
    rng = np.random.default_rng(seed)
    out = np.empty(episodes)
    logs: list[RunLog] = []
    for c0 in range(0, episodes, CHUNK):
        size = min(CHUNK, episodes - c0)
        U = rng.random((size, n))
        V = np.empty_like(U)
        for j in range(n):
            V[:, j] = days[j].quantile(U[:, j])
        free_at = np.zeros(size, dtype=np.int64)
        reward = np.zeros(size)
        for j in range(n):
            act = np.nonzero(free_at <= j)[0]
            if act.size == 0:
                continue
            t = tables[j]
            v = V[act, j]
            r = np.searchsorted(t.edges, v, side="right")
            x = t.alloc[r]
            reward += np.bincount(act, weights=x * g.value_part(v) + g.payment_coef * t.total[r] * (x > 0),
                                  minlength=size)
            free_at[act] = j + np.maximum(x, 1)
        out[c0:c0 + size] = reward
        while len(logs) < min(log_episodes, episodes) and len(logs) < c0 + size:
            k = len(logs)
            log = _run_scalar(mech, V[k - c0])
            if abs(log.total_reward - reward[k - c0]) > 1e-9 * max(1.0, abs(log.total_reward)):
                raise InvariantError(f"episode {k}: batch reward {reward[k - c0]} != "
                                     f"scalar reward {log.total_reward}")
            logs.append(log)
    mean = float(np.mean(out))
    stderr = float(np.std(out, ddof=1) / math.sqrt(episodes)) if episodes > 1 else math.nan
    return SimResult(mean, stderr, episodes, tuple(logs), out)


@dataclass(frozen=True)
class ReplayReport:
    bookkeeping: tuple[str, ...]
    ir_violations: tuple[str, ...]
    reward_mismatch: float | None  # |recomputed - logged| when above tolerance

    @property
    def ok(self) -> bool:
        return not self.bookkeeping and not self.ir_violations and self.reward_mismatch is None


def replay(log: RunLog, tol: float = 1e-9) -> ReplayReport:
    book, ir = [], []
    recs = log.records
    total = 0.0
    busy_left, renter, paid, ell = 0, math.nan, 0.0, 0
    n = len(recs)
    for k, r in enumerate(recs):
        if r.horizon != n - k or r.day != k + 1:
            book.append(f"day {r.day}: horizon {r.horizon} out of sequence")
        if r.available != (busy_left == 0):
            book.append(f"day {r.day}: availability flag {r.available} is wrong")
        if busy_left == 0:
            if r.alloc > r.horizon:
                book.append(f"day {r.day}: allocation {r.alloc} exceeds horizon {r.horizon}")
            if r.alloc == 0:
                if r.payment != 0:
                    book.append(f"day {r.day}: payment charged on an idle day")
                continue
            busy_left, renter, paid, ell = r.alloc, r.arrival_valuation, 0.0, 0
            if r.renter_valuation != renter:
                book.append(f"day {r.day}: renter is not today's arrival")
        else:
            if r.alloc != 0:
                book.append(f"day {r.day}: allocation while occupied")
            if r.renter_valuation != renter:
                book.append(f"day {r.day}: renter changed mid-tenancy")
        ell += 1
        paid += r.payment
        if ell * renter - paid < -tol * max(1.0, paid):
            ir.append(f"day {r.day}: cumulative utility {ell * renter - paid} < 0")
        total += log.g.eval(renter, r.payment)
        busy_left -= 1
    mismatch = abs(total - log.total_reward)
    return ReplayReport(tuple(book), tuple(ir),
                        mismatch if mismatch > tol * max(1.0, abs(total)) else None)
