"""
Local-time estimators of the squared diffusion coefficient.

The price range ``[min, max]`` is normalised to ``[0, 1]`` and covered by
bands of half-width ``h = n**(-1/3)``; band centres sit at odd multiples of
``h``.  In every band the estimator averages the normalised squared
increments ``(S_{i+1} - S_i)**2 / dt`` of the observations falling in it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from .market_data import PriceSeries


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Band centres and half-widths.

    ``half_width`` is in normalised units (a fraction of the price range),
    ``half_width_price`` in currency units.
    """

    centers: np.ndarray
    half_width: float
    half_width_price: float

    @property
    def size(self) -> int:
        return self.centers.size

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width_price


@dataclass(frozen=True)
class VolatilityEstimate:
    """Per-centre estimates of sigma**2.

    ``visits`` counts observations strictly inside each band.  For the kernel
    weighted estimator ``effective_visits`` is the sum of weights, otherwise
    it equals ``visits``.  ``sigma_sq`` is NaN where a band was never visited.
    """

    centers: np.ndarray
    visits: np.ndarray
    effective_visits: np.ndarray
    sigma_sq: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    reliable: np.ndarray
    estimator: str
    half_width_price: float

    def __len__(self):
        return self.centers.size

    def take(self, index) -> "VolatilityEstimate":
        return replace(
            self,
            centers=self.centers[index],
            visits=self.visits[index],
            effective_visits=self.effective_visits[index],
            sigma_sq=self.sigma_sq[index],
            ci_low=self.ci_low[index],
            ci_high=self.ci_high[index],
            reliable=self.reliable[index],
        )

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(self.sigma_sq)


def bandwidth(n: int) -> float:
    """Half-width ``n**(-1/3)`` in normalised price units."""
    return 1.0 / np.cbrt(float(n))


def build_grid(series: PriceSeries) -> GridSpec:
    n = series.n
    if n < 8:
        raise EstimationError(f"need n >= 8 observations for h < 1/2, got {n}")
    lo, hi = float(series.prices.min()), float(series.prices.max())
    if hi <= lo:
        raise EstimationError("constant series: price range is empty")
    h = bandwidth(n)
    # guard ceil against cbrt round-off, e.g. n=1000 must give exactly 5
    count = math.ceil(1.0 / (2.0 * h) - 1e-9) + 1
    k = np.arange(1, count + 1)
    centers = lo + (2 * k - 1) * h * (hi - lo)
    return GridSpec(centers=centers, half_width=h, half_width_price=h * (hi - lo))


def _squared_increments(series: PriceSeries) -> tuple[np.ndarray, np.ndarray]:
    px = series.prices
    return px[:-1], np.diff(px) ** 2 / series.dt


def _assemble(centers, visits, eff, sigma_sq, estimator, half_width_price):
    sigma_sq = np.where(eff > 0, sigma_sq, np.nan)
    return VolatilityEstimate(
        centers=np.asarray(centers, dtype=float),
        visits=np.asarray(visits, dtype=int),
        effective_visits=np.asarray(eff, dtype=float),
        sigma_sq=sigma_sq,
        ci_low=sigma_sq.copy(),
        ci_high=sigma_sq.copy(),
        reliable=visits > 0,
        estimator=estimator,
        half_width_price=float(half_width_price),
    )


def zmirou_estimate(series: PriceSeries, grid: GridSpec) -> VolatilityEstimate:
    """Band-average estimator of sigma**2 at every grid centre.

    Boundary ties ``|S_i - x| == half_width_price`` are excluded.
    """
    levels, incr = _squared_increments(series)
    inside = np.abs(levels[None, :] - grid.centers[:, None]) < grid.half_width_price
    visits = inside.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        sigma_sq = (inside * incr[None, :]).sum(axis=1) / visits
    return _assemble(grid.centers, visits, visits.astype(float), sigma_sq, "zmirou", grid.half_width_price)


def smoothed_estimate(series: PriceSeries, grid: GridSpec) -> VolatilityEstimate:
    """Triangular-kernel weighted variant of :func:`zmirou_estimate`."""
    levels, incr = _squared_increments(series)
    u = (levels[None, :] - grid.centers[:, None]) / grid.half_width_price
    weights = np.clip(1.0 - np.abs(u), 0.0, None)
    visits = (np.abs(u) < 1.0).sum(axis=1)
    eff = weights.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        sigma_sq = (weights * incr[None, :]).sum(axis=1) / eff
    return _assemble(grid.centers, visits, eff, sigma_sq, "smoothed", grid.half_width_price)


ESTIMATORS = {"zmirou": zmirou_estimate, "smoothed": smoothed_estimate}


def confidence_interval(est: VolatilityEstimate, level: float = 0.95) -> VolatilityEstimate:
    """Attach normal-approximation intervals ``s2 * (1 +- z*sqrt(2/N))``.

    The lower bound is clamped at zero.  Unvisited centres keep NaN bounds.
    """
    if not 0.0 < level < 1.0:
        raise EstimationError(f"level must lie in (0, 1), got {level}")
    z = norm.ppf(0.5 * (1.0 + level))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = z * np.sqrt(2.0 / est.effective_visits)
    low = est.sigma_sq * np.maximum(0.0, 1.0 - rel)
    high = est.sigma_sq * (1.0 + rel)
    return replace(est, ci_low=low, ci_high=high)


def reliability_filter(est: VolatilityEstimate, min_visits: int = 2) -> VolatilityEstimate:
    """Keep the longest leading run of centres visited at least *min_visits* times."""
    if min_visits < 1:
        raise EstimationError(f"min_visits must be >= 1, got {min_visits}")
    ok = est.visits >= min_visits
    stop = int(np.argmin(ok)) if not ok.all() else ok.size
    if stop == 0:
        raise EstimationError("no reliable grid points: first centre has too few visits")
    return est.take(slice(0, stop))


def mark_reliable(est: VolatilityEstimate, min_visits: int = 2, max_points: int | None = None) -> VolatilityEstimate:
    """Flag the retained prefix without dropping rows (for tabular output)."""
    kept = len(reliability_filter(est, min_visits))
    if max_points is not None:
        kept = min(kept, max_points)
    flags = np.zeros(len(est), dtype=bool)
    flags[:kept] = True
    return replace(est, reliable=flags)
