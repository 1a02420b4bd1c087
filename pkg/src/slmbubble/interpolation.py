"""Interpolation of volatility estimates on the observed price interval."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import LinAlgError, cho_factor, cho_solve

POSITIVITY_MESH = 512


class InterpolationError(ValueError):
    pass


@dataclass(frozen=True)
class BoundedCurve:
    """Volatility curve defined on ``[x[0], x[-1]]`` only."""

    x: np.ndarray
    sigma: np.ndarray
    method: str
    _fn: Callable[[np.ndarray], np.ndarray]

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(x < lo - 1e-12 * abs(lo)) or np.any(x > hi + 1e-12 * abs(hi)):
            raise InterpolationError(f"query outside bounded domain [{lo}, {hi}]")
        return self._fn(np.clip(x, lo, hi))

    def mesh(self, size: int = POSITIVITY_MESH) -> np.ndarray:
        lo, hi = self.domain
        return np.linspace(lo, hi, size)

    def check_positive(self, size: int = POSITIVITY_MESH) -> None:
        values = self(self.mesh(size))
        if np.any(values <= 0):
            where = self.mesh(size)[np.argmin(values)]
            raise InterpolationError(
                f"{self.method} interpolant is non-positive near x={where:.6g} (min {values.min():.3g})"
            )


def _validate_knots(x, sigma, min_count=2):
    x = np.asarray(x, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if x.shape != sigma.shape or x.ndim != 1:
        raise InterpolationError("knot abscissae and values must be 1-D arrays of equal length")
    if x.size < min_count:
        raise InterpolationError(f"need at least {min_count} knots, got {x.size}")
    if np.any(np.diff(x) <= 0):
        raise InterpolationError("knots must be strictly ascending (no duplicates)")
    if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
        raise InterpolationError("volatility values at knots must be finite and > 0")
    return x, sigma


def cubic_spline(x, sigma) -> BoundedCurve:
    """Natural cubic spline through ``(x_k, sigma_k)``."""
    x, sigma = _validate_knots(x, sigma)
    spline = CubicSpline(x, sigma, bc_type="natural")
    return BoundedCurve(x, sigma, "spline", spline)


def exponential_kernel(x, y, tau: float):
    """First-order Sobolev kernel ``exp(-tau |x - y|) / (2 tau)``."""
    return np.exp(-tau * np.abs(np.subtract.outer(x, y))) / (2.0 * tau)


def rkhs_interpolate(x, sigma, tau: float = 6.0) -> BoundedCurve:
    """Exact kernel interpolant ``sum_j a_j K(x, x_j)``.

    The kernel acts on abscissae rescaled to ``[0, 1]`` over the knot span so
    that *tau* does not depend on the price level.  A single knot is allowed.
    """
    if not tau > 0:
        raise InterpolationError(f"tau must be > 0, got {tau}")
    x, sigma = _validate_knots(x, sigma, min_count=1)
    lo = x[0]
    span = x[-1] - x[0] if x.size > 1 else 1.0
    u = (x - lo) / span
    gram = exponential_kernel(u, u, tau)
    try:
        weights = cho_solve(cho_factor(gram), sigma)
    except LinAlgError as exc:
        raise InterpolationError("kernel Gram matrix is singular") from exc
    if np.linalg.cond(gram) > 1e14:
        raise InterpolationError("kernel Gram matrix is numerically singular")

    def evaluate(q):
        q = np.asarray(q, dtype=float)
        return exponential_kernel((q - lo) / span, u, tau) @ weights

    return BoundedCurve(x, sigma, "rkhs", evaluate)


def interpolate(x, sigma, method: str = "rkhs", tau: float = 6.0) -> BoundedCurve:
    """Build sigma^b with *method*; ``rkhs`` falls back to the spline if the Gram solve fails."""
    if method == "spline":
        curve = cubic_spline(x, sigma)
    elif method == "rkhs":
        try:
            curve = rkhs_interpolate(x, sigma, tau)
        except InterpolationError as exc:
            if "singular" not in str(exc):
                raise
            curve = cubic_spline(x, sigma)
    else:
        raise InterpolationError(f"unknown interpolation method {method!r}")
    curve.check_positive()
    return curve
