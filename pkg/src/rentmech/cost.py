"""Seller cost tables and the over-time (opportunity) cost of renting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class CostFn:
    """c(0..n) as a table; c(0) = 0 and non-decreasing."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(c) for c in self.values)
        object.__setattr__(self, "values", vals)
        if not vals or vals[0] != 0.0:
            raise ValueError("cost must satisfy c(0) = 0")
        if any(b < a - 1e-9 for a, b in zip(vals, vals[1:])):
            raise ValueError("cost must be non-decreasing")

    @classmethod
    def zero(cls, n: int) -> "CostFn":
        return cls((0.0,) * (n + 1))

    @property
    def horizon(self) -> int:
        return len(self.values) - 1

    def __call__(self, x: int) -> float:
        return self.values[x]


@dataclass(frozen=True)
class RewardTable:
    """R[0..n]: expected reward of the optimal (restricted) rental per horizon."""

    R: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(r) for r in self.R)
        object.__setattr__(self, "R", vals)
        if not vals or vals[0] != 0.0:
            raise ValueError("reward table must start with R[0] = 0")

    def __getitem__(self, h: int) -> float:
        return self.R[h]

    def __len__(self) -> int:
        return len(self.R)

    def is_monotone(self, tol: float = 1e-9) -> bool:
        return all(b >= a - tol for a, b in zip(self.R, self.R[1:]))


def over_time_cost(R: Sequence[float] | RewardTable, h: int, x: int) -> float:
    """R[h-1] - R[h - max(x, 1)]: the future reward forgone by renting x days."""
    if not 0 <= x <= h:
        raise ValueError(f"allocation {x} outside 0..{h}")
    return R[h - 1] - R[h - max(x, 1)]


def over_time_cost_fn(R: Sequence[float] | RewardTable, h: int) -> CostFn:
    return CostFn(tuple(over_time_cost(R, h, x) for x in range(h + 1)))
