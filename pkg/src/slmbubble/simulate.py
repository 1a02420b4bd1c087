"""
Euler-Maruyama paths of ``dS = sigma0 * S**theta dW + b(S) dt``.

Used as ground truth: the tail exponent ``theta`` decides whether the
driftless process is a strict local martingale (``theta > 1``).
Prices are absorbed at ``FLOOR`` once they reach it.

Random numbers come from numpy's PCG64 generator (``numpy.random.default_rng``),
so a seed reproduces a path bit-for-bit within this implementation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .market_data import PriceSeries

FLOOR = 1e-8
RNG_ALGORITHM = "numpy.random.PCG64"
EPOCH_START = 946684800.0  # 2000-01-01T00:00:00Z
BAR_SECONDS = 60.0


@dataclass(frozen=True)
class SimSpec:
    sigma0: float
    theta: float
    s0: float = 1.0
    steps: int = 10_000
    horizon: float = 1.0
    seed: int = 0
    drift: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.sigma0 < 0:
            raise ValueError("sigma0 must be >= 0")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if not self.s0 > 0:
            raise ValueError("s0 must be > 0")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if not self.horizon > 0:
            raise ValueError("horizon must be > 0")

    @property
    def dt(self) -> float:
        # `steps` observations span [0, horizon]
        return self.horizon / (self.steps - 1)


def brownian_increments(spec: SimSpec) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)
    return rng.standard_normal(spec.steps - 1) * np.sqrt(spec.dt)


def euler_path(spec: SimSpec, dw: np.ndarray, dt: float | None = None) -> np.ndarray:
    """Integrate one path driven by the increments *dw*."""
    dt = spec.dt if dt is None else dt
    sig, theta, drift = spec.sigma0, spec.theta, spec.drift
    out = np.empty(dw.size + 1)
    s = float(spec.s0)
    out[0] = s
    for i, w in enumerate(dw.tolist()):
        if s > FLOOR:
            step = sig * s ** theta * w
            if drift is not None:
                step += drift(s) * dt
            s = s + step
            if s <= FLOOR:
                s = FLOOR
        out[i + 1] = s
    return out


def simulate(spec: SimSpec) -> PriceSeries:
    prices = euler_path(spec, brownian_increments(spec))
    stamps = EPOCH_START + BAR_SECONDS * np.arange(spec.steps)
    return PriceSeries(stamps, prices, time_span=spec.horizon)


def simulate_terminal(spec: SimSpec, n_paths: int, steps: int | None = None) -> np.ndarray:
    """Terminal values of *n_paths* driftless paths, vectorised across paths.

    One generator seeded with ``spec.seed`` feeds all paths, so these paths are
    not the ones :func:`simulate` returns for individual seeds.
    """
    steps = spec.steps if steps is None else steps
    dt = spec.horizon / (steps - 1)
    rng = np.random.default_rng(spec.seed)
    s = np.full(n_paths, float(spec.s0))
    alive = np.ones(n_paths, dtype=bool)
    sqdt = np.sqrt(dt)
    for _ in range(steps - 1):
        dw = rng.standard_normal(n_paths) * sqdt
        s = np.where(alive, s + spec.sigma0 * s ** spec.theta * dw, s)
        hit = alive & (s <= FLOOR)
        s[hit] = FLOOR
        alive &= ~hit
    return s


def ground_truth_alpha(spec: SimSpec) -> float:
    """Tail power of ``sigma(x) = sigma0 * x**theta``, i.e. ``theta``."""
    return float(spec.theta)


def ground_truth_bubble(spec: SimSpec) -> bool:
    # int x^(1 - 2 theta) dx converges iff theta > 1
    return spec.theta > 1.0
