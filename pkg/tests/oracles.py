"""Independent reference computations used by the tests.

None of these call into the code paths they check, except where noted
(the reproducing-property oracle differentiates the package kernel
numerically, which is the point of that check).
"""
import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import quad

TRUNCATION = 1e6


def kernel_quadrature(n, m, x, y, upper=TRUNCATION):
    """``n^2 int_{max}^inf ((v-x)(v-y))^(n-1) v^(-2n-m) dv`` by quadrature.

    ``[max, upper]`` is integrated numerically on geometric sub-intervals;
    beyond *upper* the integrand is a finite sum of powers of ``v`` and its
    tail is added exactly.  Returns ``(value, tail)``.
    """
    lo = max(x, y)
    poly = P.polypow([-x, 1.0], n - 1) if n > 1 else np.array([1.0])
    poly = P.polymul(poly, P.polypow([-y, 1.0], n - 1)) if n > 1 else poly

    def integrand(v):
        return n * n * P.polyval(v, poly) * v ** (-2 * n - m)

    edges = np.geomspace(lo, upper, int(np.log10(upper / lo)) * 4 + 2)
    body = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        part, _ = quad(integrand, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
        body += part
    # int_U^inf v^(k - 2n - m) dv = U^(k - 2n - m + 1) / (2n + m - k - 1)
    tail = 0.0
    for k, coef in enumerate(poly):
        p = 2 * n + m - k - 1
        tail += n * n * coef * upper ** (-p) / p
    return body + tail, tail


def fd_derivative(fn, y, order, x0):
    """Fourth-order finite-difference derivative of *fn* at *y*.

    Stencils never straddle the kink at *x0*: near it a one-sided
    formula on the side of *y* is used.
    """
    h = 1e-3 * y
    if abs(y - x0) > 2.5 * h:
        if order == 1:
            c = np.array([1, -8, 0, 8, -1]) / 12.0
        else:
            c = np.array([-1, 16, -30, 16, -1]) / 12.0
        pts = y + h * np.arange(-2, 3)
        return c @ fn(pts) / h ** order
    sign = 1.0 if y >= x0 else -1.0
    h = max(min(h, abs(y - x0) / 5.0), 1e-6 * y) if abs(y - x0) > 0 else 1e-6 * y
    k = np.arange(0, 6)
    pts = y + sign * h * k
    # one-sided weights from the Vandermonde system
    A = np.vander(sign * h * k, 6, increasing=True).T
    rhs = np.zeros(6)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    w = np.linalg.solve(A, rhs)
    return w @ fn(pts)


def weighted_norm_sq(fn, n, m, x0, upper=1e4):
    """``int_0^inf (y^n g^(n)(y) / n!)^2 y^m dy`` for ``g = fn`` by quadrature."""
    fact = float(np.prod(np.arange(1, n + 1)))

    def integrand(y):
        d = fd_derivative(fn, y, n, x0)
        return (y ** n * d / fact) ** 2 * y ** m

    left, _ = quad(integrand, 1e-9, x0, limit=200, epsabs=1e-16, epsrel=1e-10)
    edges = np.geomspace(x0, upper, 12)
    right = sum(quad(integrand, a, b, limit=200, epsabs=0.0, epsrel=1e-10)[0] for a, b in zip(edges[:-1], edges[1:]))
    return left + right


def natural_spline_tridiagonal(x, y):
    """Natural cubic spline via the textbook second-derivative system (Thomas algorithm)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    k = x.size - 1
    h = np.diff(x)
    M = np.zeros(k + 1)
    if k >= 2:
        sub = h[:-1].copy()
        diag = 2.0 * (h[:-1] + h[1:])
        sup = h[1:].copy()
        rhs = 6.0 * (np.diff(y)[1:] / h[1:] - np.diff(y)[:-1] / h[:-1])
        size = k - 1
        for i in range(1, size):
            w = sub[i] / diag[i - 1]
            diag[i] -= w * sup[i - 1]
            rhs[i] -= w * rhs[i - 1]
        inner = np.zeros(size)
        inner[-1] = rhs[-1] / diag[-1]
        for i in range(size - 2, -1, -1):
            inner[i] = (rhs[i] - sup[i] * inner[i + 1]) / diag[i]
        M[1:-1] = inner

    def evaluate(q):
        q = np.atleast_1d(np.asarray(q, float))
        i = np.clip(np.searchsorted(x, q) - 1, 0, k - 1)
        hi = h[i]
        a = (x[i + 1] - q) / hi
        b = (q - x[i]) / hi
        return (a * y[i] + b * y[i + 1]
                + ((a ** 3 - a) * M[i] + (b ** 3 - b) * M[i + 1]) * hi ** 2 / 6.0)

    return evaluate
