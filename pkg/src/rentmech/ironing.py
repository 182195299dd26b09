"""Grid-numerical ironing of virtual-value functions.

The function is pulled back to quantile space, h(q) = theta(F^-1(q)), its
running integral H is tabulated on a uniform grid, and H is replaced by its
greatest convex minorant Psi (lower convex hull, monotone-chain scan).  Psi is
piecewise linear, so its slope is constant on each grid cell; the ironed
function psi stores those cell slopes as values at the cell midpoints and
interpolates linearly between them.  This reproduces h exactly wherever h is
linear and no ironing happened, and is constant on every ironed interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dist import Distribution

DEFAULT_GRID = 10_000
# flat-region tolerance for inverse queries, relative to max(1, |y|)
INVERSE_TOL = 1e-9


def lower_hull(x: np.ndarray, y: np.ndarray) -> list[int]:
    """Indices of the lower convex hull of points sorted by ``x``.

    Collinear points are dropped, so every returned vertex is a strict corner.
    """
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if cross > 0:
                break
            hull.pop()
        hull.append(i)
    return hull


@dataclass(frozen=True, eq=False)
class IronedFn:
    dist: Distribution
    quantile_grid: np.ndarray
    values: np.ndarray  # psi at each grid quantile
    slopes: np.ndarray  # psi on each grid cell (hull slope)
    H: np.ndarray
    Psi: np.ndarray
    raw: np.ndarray  # h at each grid quantile

    @property
    def m(self) -> int:
        return len(self.quantile_grid) - 1

    def at_quantile(self, q):
        return np.interp(q, self.quantile_grid, self.values)

    def __call__(self, v):
        v_arr = np.asarray(v, dtype=float)
        if np.any(v_arr < self.dist.lo - 1e-12) or np.any(v_arr > self.dist.hi + 1e-12):
            raise ValueError("valuation outside the support")
        out = self.at_quantile(self.dist.cdf(v_arr))
        return float(out) if np.ndim(out) == 0 else out

    def sup_inverse(self, y: float, tol: float = INVERSE_TOL) -> float:
        """sup{v in support : psi(F(v)) <= y}.

        Returns the lower end of the support when the set is empty and the
        upper end when psi never exceeds ``y``.  On a flat stretch at level
        ``y`` this is the right end of the stretch, which is also
        sup{v : psi(F(v)) == y}.
        """
        vals, q = self.values, self.quantile_grid
        thr = y + tol * max(1.0, abs(y))
        if vals[0] > thr:
            return self.dist.lo
        if vals[-1] <= thr:
            return self.dist.hi
        j = int(np.searchsorted(vals, thr, side="right")) - 1
        step = vals[j + 1] - vals[j]
        frac = min(max((y - vals[j]) / step, 0.0), 1.0)
        qs = q[j] + frac * (q[j + 1] - q[j])
        if qs <= 1e-12:
            return self.dist.lo
        if qs >= 1.0 - 1e-12:
            return self.dist.hi
        return float(self.dist.quantile(qs))

    def integral(self, qa: float, qb: float) -> float:
        """Integral of the interpolated psi over quantiles [qa, qb]."""
        return self._cum(qb) - self._cum(qa)

    def _cum(self, x: float) -> float:
        q, vals = self.quantile_grid, self.values
        x = min(max(x, 0.0), 1.0)
        cum = self._cumulative
        j = min(int(np.searchsorted(q, x, side="right")) - 1, len(q) - 2)
        vx = vals[j] + (vals[j + 1] - vals[j]) * (x - q[j]) / (q[j + 1] - q[j])
        return float(cum[j] + 0.5 * (x - q[j]) * (vals[j] + vx))

    @property
    def _cumulative(self) -> np.ndarray:
        cache = self.__dict__.get("_cum_cache")
        if cache is None:
            dq = np.diff(self.quantile_grid)
            cache = np.concatenate([[0.0], np.cumsum(0.5 * dq * (self.values[:-1] + self.values[1:]))])
            self.__dict__["_cum_cache"] = cache
        return cache

    def cond_mean(self, a: float, b: float) -> float:
        """E[psi(F(v)) | a <= v < b]."""
        qa, qb = float(self.dist.cdf(a)), float(self.dist.cdf(b))
        if qb <= qa:
            raise ValueError(f"[{a}, {b}) has zero probability")
        return self.integral(qa, qb) / (qb - qa)

    def ironed_regions(self, tol: float = 1e-12) -> list[tuple[float, float]]:
        """Maximal quantile intervals on which Psi < H."""
        gap = self.H - self.Psi > tol * max(1.0, float(np.max(np.abs(self.H))))
        regions = []
        j = 0
        q = self.quantile_grid
        while j < len(gap):
            if gap[j]:
                k = j
                while k + 1 < len(gap) and gap[k + 1]:
                    k += 1
                regions.append((float(q[j - 1]), float(q[k + 1])))
                j = k + 1
            else:
                j += 1
        return regions


def _evaluate(theta: Callable, v: np.ndarray) -> np.ndarray:
    try:
        h = np.asarray(theta(v), dtype=float)
    except (TypeError, ValueError):
        h = None
    if h is None or h.shape != v.shape:
        h = np.array([float(theta(float(x))) for x in v])
    if not np.all(np.isfinite(h)):
        raise ValueError("theta is not finite on the support")
    return h


def iron(theta: Callable, d: Distribution, m: int = DEFAULT_GRID) -> IronedFn:
    """Iron ``theta`` against the prior ``d`` on an ``m``-cell quantile grid."""
    if m < 16:
        raise ValueError("ironing grid needs m >= 16")
    q = np.linspace(0.0, 1.0, m + 1)
    dq = np.diff(q)
    h = _evaluate(theta, np.asarray(d.quantile(q), dtype=float))
    # midpoint rule per cell: exact when theta(F^-1(q)) is linear inside each
    # cell, which keeps jumps at grid quantiles from leaking into H
    h_mid = _evaluate(theta, np.asarray(d.quantile(0.5 * (q[:-1] + q[1:])), dtype=float))
    H = np.concatenate([[0.0], np.cumsum(dq * h_mid)])
    verts = lower_hull(q, H)
    Psi = np.interp(q, q[verts], H[verts])
    slopes = np.maximum.accumulate(np.diff(Psi) / dq)
    values = np.empty(m + 1)
    values[1:-1] = 0.5 * (slopes[:-1] + slopes[1:])
    values[0] = 1.5 * slopes[0] - 0.5 * slopes[1]
    values[-1] = 1.5 * slopes[-1] - 0.5 * slopes[-2]
    return IronedFn(d, q, values, slopes, H, Psi, h)
