"""Valuation priors supported on a single bounded interval.

Two families are provided: :class:`Uniform` with closed-form access, and
:class:`GridDistribution`, a piecewise-linear cdf through a list of knots
(equivalently a piecewise-constant density).  Both are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, EmptyIntervalError


class Distribution:
    """Common interface.  Subclasses define ``lo``, ``hi``, ``cdf``, ``pdf``,
    ``quantile`` and ``_moment`` (the mass and first moment on ``[a, b]``)."""

    lo: float
    hi: float
    kind: str

    def cdf(self, v):
        raise NotImplementedError

    def pdf(self, v):
        raise NotImplementedError

    def quantile(self, q):
        raise NotImplementedError

    def _moment(self, a: float, b: float) -> tuple[float, float]:
        raise NotImplementedError

    def interval_prob(self, a: float, b: float) -> float:
        if a > b:
            raise ValueError(f"interval_prob needs a <= b, got a={a}, b={b}")
        return float(np.clip(self.cdf(b) - self.cdf(a), 0.0, 1.0))

    def cond_mean(self, a: float, b: float) -> float:
        """E[v | a <= v <= b]."""
        a, b = max(a, self.lo), min(b, self.hi)
        if b < a:
            raise EmptyIntervalError(f"[{a}, {b}] does not meet the support")
        mass, moment = self._moment(a, b)
        if mass <= 0.0:
            raise EmptyIntervalError(f"[{a}, {b}] has zero probability")
        return float(np.clip(moment / mass, a, b))

    def mean(self) -> float:
        return self.cond_mean(self.lo, self.hi)

    def expect(self, fn: Callable, a: float | None = None, b: float | None = None,
               points: int = 4097) -> float:
        """E[fn(v) | a <= v <= b] by Simpson's rule in quantile space."""
        a = self.lo if a is None else a
        b = self.hi if b is None else b
        qa, qb = float(self.cdf(a)), float(self.cdf(b))
        if qb <= qa:
            raise EmptyIntervalError(f"[{a}, {b}] has zero probability")
        if points % 2 == 0:
            points += 1
        q = np.linspace(qa, qb, points)
        y = np.asarray(fn(self.quantile(q)), dtype=float)
        w = np.ones(points)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return float(np.dot(w, y) / (3.0 * (points - 1)))

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-transform sample; all randomness comes from ``rng``."""
        u = rng.random(size)
        return self.quantile(u) if size is not None else float(self.quantile(u))

    def discretize(self, k: int) -> "DiscreteGrid":
        """``k`` equal-mass quantile midpoints."""
        if k < 2:
            raise ValueError("discretize needs k >= 2")
        q = (np.arange(k) + 0.5) / k
        pts = np.asarray(self.quantile(q), dtype=float)
        return DiscreteGrid(tuple(float(p) for p in pts), tuple([1.0 / k] * k))

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float
    hi: float
    kind: str = field(default="uniform", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ConfigError("unbounded supports are not supported", "hi")
        if self.lo < 0:
            raise ConfigError("valuations must be nonnegative", "lo")
        if not self.hi > self.lo:
            raise ConfigError(f"need lo < hi, got [{self.lo}, {self.hi}]", "hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def cdf(self, v):
        return np.clip((np.asarray(v, dtype=float) - self.lo) / self.width, 0.0, 1.0)

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.where((v >= self.lo) & (v <= self.hi), 1.0 / self.width, 0.0)

    def quantile(self, q):
        return self.lo + np.clip(np.asarray(q, dtype=float), 0.0, 1.0) * self.width

    def _moment(self, a, b):
        return (b - a) / self.width, (b * b - a * a) / (2.0 * self.width)

    def to_config(self):
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class GridDistribution(Distribution):
    """Piecewise-linear cdf through ``cdf_points`` = ((v_0, 0), ..., (v_K, 1)).

    Both coordinates must be strictly increasing, so the density is positive
    on every segment of the support.
    """

    cdf_points: tuple[tuple[float, float], ...]
    kind: str = field(default="grid", init=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)
    _F: np.ndarray = field(init=False, repr=False, compare=False)
    _dens: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.cdf_points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ConfigError("cdf_points must be a list of at least two [v, F(v)] pairs",
                              "cdf_points")
        v, F = pts[:, 0], pts[:, 1]
        if not np.all(np.isfinite(v)):
            raise ConfigError("unbounded supports are not supported", "cdf_points")
        if v[0] < 0:
            raise ConfigError("valuations must be nonnegative", "cdf_points[0]")
        if abs(F[0]) > 1e-12 or abs(F[-1] - 1.0) > 1e-9:
            raise ConfigError("cdf must start at 0 and end at 1", "cdf_points")
        bad_v = np.nonzero(np.diff(v) <= 0)[0]
        if len(bad_v):
            raise ConfigError("valuations must be strictly increasing",
                              f"cdf_points[{bad_v[0] + 1}]")
        bad_F = np.nonzero(np.diff(F) <= 0)[0]
        if len(bad_F):
            raise ConfigError("cdf must be strictly increasing (single-interval support)",
                              f"cdf_points[{bad_F[0] + 1}]")
        F = F.copy()
        F[0], F[-1] = 0.0, 1.0
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_F", F)
        object.__setattr__(self, "_dens", np.diff(F) / np.diff(v))

    @classmethod
    def from_pdf(cls, pdf: Callable, lo: float, hi: float, m: int = 10_000):
        """Tabulate an (unnormalized) density on ``m`` cells."""
        v = np.linspace(lo, hi, m + 1)
        f = np.asarray(pdf(v), dtype=float)
        if np.any(f < 0) or not np.all(np.isfinite(f)):
            raise ConfigError("density must be finite and nonnegative", "pdf")
        cells = 0.5 * (f[:-1] + f[1:]) * np.diff(v)
        F = np.concatenate([[0.0], np.cumsum(cells)])
        F /= F[-1]
        return cls(tuple(zip(v.tolist(), F.tolist())))

    @property
    def lo(self) -> float:
        return float(self._v[0])

    @property
    def hi(self) -> float:
        return float(self._v[-1])

    @property
    def knots(self) -> np.ndarray:
        return self._v

    def _segment(self, v):
        return np.clip(np.searchsorted(self._v, v, side="right") - 1, 0, len(self._v) - 2)

    def cdf(self, v):
        return np.interp(np.asarray(v, dtype=float), self._v, self._F)

    def pdf(self, v):
        # constant on each segment; at interior knots the right segment wins,
        # at the endpoints the adjacent segment (nonzero by construction)
        v = np.asarray(v, dtype=float)
        d = self._dens[self._segment(v)]
        return np.where((v >= self.lo) & (v <= self.hi), d, 0.0)

    def quantile(self, q):
        return np.interp(np.clip(np.asarray(q, dtype=float), 0.0, 1.0), self._F, self._v)

    def _moment(self, a, b):
        x1 = np.clip(self._v[:-1], a, b)
        x2 = np.clip(self._v[1:], a, b)
        mass = float(np.sum(self._dens * (x2 - x1)))
        moment = float(np.sum(self._dens * (x2 * x2 - x1 * x1)) / 2.0)
        return mass, moment

    def to_config(self):
        return {"kind": "grid", "cdf_points": [list(p) for p in self.cdf_points]}


@dataclass(frozen=True)
class DiscreteGrid:
    """A finite support with probability masses (oracle discretization)."""

    points: tuple[float, ...]
    masses: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) != len(self.masses) or not self.points:
            raise ValueError("points and masses must be nonempty and of equal length")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValueError("points must be strictly increasing")
        if any(m < 0 for m in self.masses):
            raise ValueError("masses must be nonnegative")
        if abs(math.fsum(self.masses) - 1.0) > 1e-12:
            raise ValueError("masses must sum to 1")

    def __len__(self):
        return len(self.points)


def from_config(cfg: dict, path: str = "distribution") -> Distribution:
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ConfigError("expected an object with a 'kind' field", path)
    kind = cfg["kind"]
    try:
        if kind == "uniform":
            return Uniform(float(cfg["lo"]), float(cfg["hi"]))
        if kind == "grid":
            return GridDistribution(tuple((float(v), float(F)) for v, F in cfg["cdf_points"]))
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", path) from None
    except ConfigError as exc:
        raise ConfigError(exc.message, f"{path}.{exc.path}" if exc.path else path) from None
    raise ConfigError(f"unknown distribution kind {kind!r}", f"{path}.kind")


def same_distribution(ds: Sequence[Distribution]) -> bool:
    return all(d == ds[0] for d in ds[1:])
