"""Designer reward functions g(v, p) and the virtual values built on them.

Every supported reward is linear in the payment: g(v, p) = a(v) + beta * p,
where a(v) is either alpha * v or a tabulated non-decreasing f(v).  The four
classes are told apart by the signs of alpha and beta:

=================  =======================
welfare_like       beta == 0
revenue_like       alpha == 0, beta > 0
positive_tradeoff  alpha > 0, beta > 0
negative_tradeoff  alpha > 0, beta < 0, alpha >= -beta
=================  =======================

Negative tradeoff is stored with a negative ``beta``; use
:meth:`RewardFn.negative_tradeoff` to build one from the usual
``alpha * v - beta * p`` parametrization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import Distribution
from .errors import ConfigError, HorizonTooSmallError, RewardClassError, SingularVirtualValueError

WELFARE = "welfare_like"
REVENUE = "revenue_like"
POSITIVE = "positive_tradeoff"
NEGATIVE = "negative_tradeoff"


@dataclass(frozen=True)
class RewardFn:
    alpha: float = 0.0
    beta: float = 0.0
    f_points: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.f_points is not None:
            if self.beta != 0 or self.alpha != 0:
                raise RewardClassError("a tabulated welfare reward takes no alpha/beta")
            pts = np.asarray(self.f_points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
                raise RewardClassError("f_points must be a list of [v, f(v)] pairs")
            if np.any(np.diff(pts[:, 0]) <= 0):
                raise RewardClassError("f_points valuations must be strictly increasing")
            if np.any(np.diff(pts[:, 1]) < 0):
                raise RewardClassError("welfare-like f must be non-decreasing")
            if pts[0, 0] == 0.0 and pts[0, 1] != 0.0:
                raise RewardClassError("reward must be normalized so that g(0, 0) = 0")
        self.kind  # validates the (alpha, beta) combination

    # -- constructors -------------------------------------------------------
    @classmethod
    def linear(cls, alpha: float, beta: float) -> "RewardFn":
        return cls(float(alpha), float(beta))

    @classmethod
    def negative_tradeoff(cls, alpha: float, beta: float) -> "RewardFn":
        """g(v, p) = alpha * v - beta * p with alpha >= beta > 0."""
        if not (alpha >= beta > 0):
            raise RewardClassError(f"negative tradeoff needs alpha >= beta > 0, got ({alpha}, {beta})")
        return cls(float(alpha), -float(beta))

    @classmethod
    def consumer_surplus(cls) -> "RewardFn":
        return cls(1.0, -1.0)

    @classmethod
    def revenue(cls, beta: float = 1.0) -> "RewardFn":
        return cls(0.0, float(beta))

    @classmethod
    def welfare(cls, f_points=None) -> "RewardFn":
        if f_points is None:
            return cls(1.0, 0.0)
        return cls(f_points=tuple((float(v), float(f)) for v, f in f_points))

    # -- classification -----------------------------------------------------
    @property
    def kind(self) -> str:
        a, b = self.alpha, self.beta
        if self.f_points is not None or (a > 0 and b == 0):
            return WELFARE
        if a == 0 and b > 0:
            return REVENUE
        if a > 0 and b > 0:
            return POSITIVE
        if a > 0 and b < 0 and a >= -b:
            return NEGATIVE
        raise RewardClassError(f"(alpha={a}, beta={b}) is not one of the supported reward classes")

    @property
    def payment_coef(self) -> float:
        return self.beta

    def value_part(self, v):
        """a(v): the payment-independent part of the per-day reward."""
        v = np.asarray(v, dtype=float)
        if self.f_points is not None:
            pts = np.asarray(self.f_points, dtype=float)
            return np.interp(v, pts[:, 0], pts[:, 1])
        return self.alpha * v

    def eval(self, v, p):
        out = self.value_part(v) + self.beta * np.asarray(p, dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, v, p):
        return self.eval(v, p)

    def total(self, v: float, schedule) -> float:
        """Sum of g(v, p_i) over a payment schedule."""
        return float(len(schedule) * self.value_part(v) + self.beta * sum(schedule))

    def to_config(self) -> dict:
        if self.f_points is not None:
            return {"class": "welfare", "f_points": [list(p) for p in self.f_points]}
        return {"class": "linear", "alpha": self.alpha, "beta": self.beta}


def from_config(cfg: dict, path: str = "reward") -> RewardFn:
    if not isinstance(cfg, dict) or "class" not in cfg:
        raise ConfigError("expected an object with a 'class' field", path)
    cls_ = cfg["class"]
    try:
        if cls_ == "linear":
            return RewardFn.linear(cfg["alpha"], cfg["beta"])
        if cls_ == "negative_tradeoff":
            return RewardFn.negative_tradeoff(cfg["alpha"], cfg["beta"])
        if cls_ == "consumer_surplus":
            return RewardFn.consumer_surplus()
        if cls_ == "revenue":
            return RewardFn.revenue(cfg.get("beta", 1.0))
        if cls_ == "welfare":
            return RewardFn.welfare(cfg.get("f_points"))
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", path) from None
    except RewardClassError as exc:
        raise ConfigError(str(exc), path) from None
    raise ConfigError(f"unknown reward class {cls_!r}", f"{path}.class")


def revenue_virtual_value(d: Distribution, v):
    """Myerson's virtual value v - (1 - F(v)) / f(v)."""
    v = np.asarray(v, dtype=float)
    if np.any(v < d.lo) or np.any(v > d.hi):
        raise ValueError("valuation outside the support")
    f = d.pdf(v)
    if np.any(f <= 0):
        raise SingularVirtualValueError("zero density inside the support")
    out = v - (1.0 - d.cdf(v)) / f
    return float(out) if out.ndim == 0 else out


def fr_virtual_value(g: RewardFn, d: Distribution, v):
    """Fixed-rate-optimal virtual value g(v, phi(v))."""
    if g.payment_coef == 0:
        out = g.value_part(v)
        return float(out) if np.ndim(out) == 0 else out
    return g.eval(v, revenue_virtual_value(d, v))


def horizon_virtual_value(g: RewardFn, d: Distribution, n: int, v):
    """Horizon-specific virtual value g(v, phi(v) / (n - 1)) for negative tradeoff."""
    if n < 2:
        raise HorizonTooSmallError(f"horizon-specific virtual values need n >= 2, got {n}")
    if g.kind != NEGATIVE:
        raise RewardClassError(f"horizon-specific virtual values are for negative tradeoff, got {g.kind}")
    return g.eval(v, revenue_virtual_value(d, v) / (n - 1))
