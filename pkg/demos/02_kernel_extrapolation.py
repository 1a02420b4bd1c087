"""
Extrapolating a known tail
==========================

Samples ``1/x^4`` at five points, which corresponds to a volatility of
``x^2``, then lets the optimiser pick the decay rate of the extrapolated
reciprocal variance.  The recovered exponent should be close to 2.
"""
import numpy as np

from slmbubble.interpolation import BoundedCurve
from slmbubble.rkhs import asymptotic_limit, kernel_q, optimize_m
from slmbubble.verdict import judge

# the kernel is symmetric and decays like max(x, y)^-(m+1)
print("q(1, 2) =", kernel_q(1, 3.0, 1.0, 2.0), " q(2, 1) =", kernel_q(1, 3.0, 2.0, 1.0))

x = np.array([1.0, 1.5, 2.0, 2.5, 3.0])
target = BoundedCurve(x, x ** 2, "exact", lambda q: np.asarray(q) ** 2)
m, model = optimize_m(x, x ** -4.0, 1, target)
print(f"optimal m = {m:.5f}, alpha = {model.alpha:.5f}")
print("largest knot mismatch:", model.residual())

far = np.array([10.0, 100.0, 1e4])
print("x^(m+1) f(x) at", far, "->", far ** (m + 1) * model.f(far), " limit", asymptotic_limit(model))

v = judge(model, epsilon=0.05)
print("verdict:", v.classification.value, " integral finite:", v.integral_finite)
