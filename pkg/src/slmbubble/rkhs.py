"""
Extrapolation of ``f = 1 / sigma**2`` to the positive half-line.

Functions live in the space ``H_{n,m}`` of ``C^n`` functions with
``x**k f^(k)(x) -> 0`` at infinity, normed by

    <f, g> = int_0^inf (y^n f^(n)(y) / n!) (y^n g^(n)(y) / n!) y^m dy.

Its reproducing kernel has the integral form

    q(x, y) = n^2 int_{max(x,y)}^inf ((v - x)(v - y))^(n-1) v^(-2n-m) dv

and the closed form

    q(x, y) = n^2 B(m+1, n) M^-(m+1) 2F1(1-n, m+1; n+m+1; min/M),  M = max(x, y).

Every element of the span of ``q(x_i, .)`` decays like ``x^-(m+1)``, so the
weight exponent ``m`` fixes the tail power of the extrapolated volatility.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.integrate import trapezoid
from scipy.special import beta as _beta

from .interpolation import BoundedCurve

MAX_CONDITION = 1e14
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class RKHSError(ValueError):
    pass


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function ``Gamma(a) Gamma(b) / Gamma(a + b)``."""
    if not (a > 0 and b > 0):
        raise RKHSError(f"Beta arguments must be positive, got ({a}, {b})")
    return float(_beta(a, b))


def hyp2f1_terminating(n: int, m: float, z):
    """``2F1(1-n, m+1; n+m+1; z)`` as its finite n-term sum.

    *z* may be an array; every entry must lie in ``[0, 1]``.
    """
    if n < 1 or int(n) != n:
        raise RKHSError(f"n must be a positive integer, got {n}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > 1):
        raise RKHSError("z must lie in [0, 1]")
    a, b, c = 1 - n, m + 1.0, n + m + 1.0
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(n - 1):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total = total + term
    return total if total.ndim else float(total)


def kernel_q(n: int, m: float, x, y):
    """Reproducing kernel of ``H_{n,m}``; broadcasts over *x* and *y*."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise RKHSError("kernel arguments must be positive")
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    out = n * n * beta_fn(m + 1.0, n) * hi ** (-(m + 1.0)) * hyp2f1_terminating(n, m, lo / hi)
    return out if np.ndim(out) else float(out)


def gram_matrix(n: int, m: float, knots) -> np.ndarray:
    knots = np.asarray(knots, dtype=float)
    return kernel_q(n, m, knots[:, None], knots[None, :])


def solve_coefficients(knots, values, n: int, m: float) -> np.ndarray:
    """Coefficients ``c`` with ``sum_i c_i q(x_i, x_k) = f_k`` for every knot.

    The Gram matrix is equilibrated by its diagonal before the Cholesky solve;
    the condition bound applies to the equilibrated matrix.
    """
    knots = np.asarray(knots, dtype=float)
    values = np.asarray(values, dtype=float)
    if knots.ndim != 1 or knots.shape != values.shape or knots.size == 0:
        raise RKHSError("knots and values must be non-empty 1-D arrays of equal length")
    if np.any(knots <= 0):
        raise RKHSError("knots must be positive")
    if np.unique(knots).size != knots.size:
        raise RKHSError("duplicate knots")
    if np.any(values <= 0):
        raise RKHSError("values must be positive")
    gram = gram_matrix(n, m, knots)
    d = 1.0 / np.sqrt(np.diag(gram))
    scaled = gram * d[:, None] * d[None, :]
    if np.linalg.cond(scaled) > MAX_CONDITION:
        raise RKHSError(f"Gram matrix numerically singular (n={n}, m={m:.6g})")
    try:
        coef = d * cho_solve(cho_factor(scaled), d * values)
    except LinAlgError as exc:
        raise RKHSError(f"Gram matrix not positive definite (n={n}, m={m:.6g})") from exc
    return coef


@dataclass(frozen=True)
class ExtrapolationModel:
    """Kernel expansion ``f(x) = sum_i c_i q(x_i, x)`` in ``H_{n,m}``."""

    n: int
    m: float
    knots: np.ndarray
    values: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def fit(cls, knots, values, n: int, m: float) -> "ExtrapolationModel":
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        coef = solve_coefficients(knots, values, n, m)
        return cls(int(n), float(m), knots, values, coef)

    @property
    def size(self) -> int:
        return self.knots.size

    @property
    def alpha(self) -> float:
        return (1.0 + self.m) / 2.0

    def f(self, x):
        x = np.asarray(x, dtype=float)
        out = kernel_q(self.n, self.m, x[..., None], self.knots) @ self.coefficients
        return out if out.ndim else float(out)

    def sigma(self, x):
        fx = np.asarray(self.f(x))
        if np.any(fx <= 0):
            raise RKHSError("extrapolated f is non-positive at a query point")
        out = fx ** -0.5
        return out if out.ndim else float(out)

    def residual(self) -> float:
        """Largest relative knot mismatch of the fitted expansion."""
        return float(np.max(np.abs(self.f(self.knots) - self.values) / self.values))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "knots": self.knots.tolist(),
            "values": self.values.tolist(),
            "coefficients": self.coefficients.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ExtrapolationModel":
        return cls(
            int(data["n"]),
            float(data["m"]),
            np.asarray(data["knots"], dtype=float),
            np.asarray(data["values"], dtype=float),
            np.asarray(data["coefficients"], dtype=float),
        )


def eval_extrapolated(model: ExtrapolationModel, x) -> tuple:
    """Return ``(f(x), sigma(x))``; raises if ``f(x) <= 0``."""
    fx = model.f(x)
    if np.any(np.asarray(fx) <= 0):
        raise RKHSError(f"f(x) <= 0 at x={x}: model invalid for this query")
    return fx, model.sigma(x)


def asymptotic_limit(model: ExtrapolationModel) -> float:
    """``lim x^(m+1) f(x) = n^2 B(m+1, n) sum(c)``."""
    total = float(np.sum(model.coefficients))
    if total <= 0:
        raise RKHSError(f"sum of coefficients {total:.6g} <= 0: no positive power-law tail")
    return model.n ** 2 * beta_fn(model.m + 1.0, model.n) * total


def last_third(curve: BoundedCurve, mesh: int = 200) -> np.ndarray:
    lo, hi = curve.domain
    return np.linspace(lo + 2.0 * (hi - lo) / 3.0, hi, mesh)


def fit_candidate(knots, values, n: int, m: float, sigma_b: BoundedCurve, mesh: int = 200):
    """Objective ``J(m)`` and the fitted model, or ``(inf, None)`` if infeasible.

    A candidate is infeasible when the Gram solve fails, ``sum(c) <= 0`` or
    ``f <= 0`` somewhere on the last third of the data interval or on
    ``[x_M, 10 x_M]``.
    """
    try:
        model = ExtrapolationModel.fit(knots, values, n, m)
    except RKHSError:
        return np.inf, None
    if np.sum(model.coefficients) <= 0:
        return np.inf, None
    grid = last_third(sigma_b, mesh)
    x_max = model.knots[-1]
    tail = np.geomspace(x_max, 10.0 * x_max, mesh)
    f_grid = model.f(grid)
    if np.any(f_grid <= 0) or np.any(model.f(tail) <= 0):
        return np.inf, None
    gap = f_grid ** -0.5 - sigma_b(grid)
    return float(np.sqrt(trapezoid(gap ** 2, grid))), model


def m_scan(knots, values, n: int, sigma_b: BoundedCurve, ms, mesh: int = 200) -> np.ndarray:
    """``J(m)`` for each candidate in *ms* (``inf`` marks infeasible)."""
    return np.array([fit_candidate(knots, values, n, m, sigma_b, mesh)[0] for m in ms])


def _golden_section(fn, a: float, b: float, tol: float = 1e-6, max_iter: int = 200) -> float:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * (1.0 + abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return c if fc <= fd else d


def optimize_m(
    knots,
    values,
    n: int,
    sigma_b: BoundedCurve,
    m_range: tuple[float, float] = (0.5, 25.0),
    mesh: int = 200,
    scan_points: int = 50,
):
    """Choose ``m`` so that sigma_m is closest in L2 to sigma^b on the last third.

    A coarse scan over *m_range* locates the best candidate; golden-section
    search then refines it between the neighbouring scan points.  Returns
    ``(m_star, model)``.
    """
    lo, hi = map(float, m_range)
    if not (0 < lo < hi):
        raise RKHSError(f"invalid m range {m_range}")
    ms = np.linspace(lo, hi, scan_points)
    scores = m_scan(knots, values, n, sigma_b, ms, mesh)
    if not np.any(np.isfinite(scores)):
        raise RKHSError(f"no feasible m in [{lo}, {hi}]")
    best = int(np.argmin(scores))
    left, right = ms[max(best - 1, 0)], ms[min(best + 1, ms.size - 1)]

    def objective(m):
        return fit_candidate(knots, values, n, m, sigma_b, mesh)[0]

    refined = _golden_section(objective, left, right)
    j_refined, model = fit_candidate(knots, values, n, refined, sigma_b, mesh)
    if not j_refined < scores[best]:
        _, model = fit_candidate(knots, values, n, ms[best], sigma_b, mesh)
    return model.m, model
