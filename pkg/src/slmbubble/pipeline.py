"""End-to-end detection pipeline and its run configuration."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import estimation, interpolation, rkhs, verdict
from .market_data import PriceSeries, rescale_time, summary


@dataclass
class RunConfig:
    field: str = "open"
    time_span: float = 1.0
    estimator: str = "zmirou"
    ci_level: float = 0.95
    min_visits: int = 2
    max_points: int | None = None
    interpolator: str = "spline"
    tau: float = 6.0
    n: int = 1
    m_min: float = 0.5
    m_max: float = 25.0
    scan_points: int = 50
    mesh: int = 200
    curve_mesh: int = 512
    epsilon: float = 0.05
    lower_bound: float | None = None
    output: str = "out"
    seed: int = 0

    def __post_init__(self):
        if self.estimator not in estimation.ESTIMATORS:
            raise ValueError(f"estimator must be one of {sorted(estimation.ESTIMATORS)}")
        if self.interpolator not in ("spline", "rkhs"):
            raise ValueError("interpolator must be 'spline' or 'rkhs'")
        if self.n < 1:
            raise ValueError("smoothness n must be >= 1")
        if not 0 < self.m_min < self.m_max:
            raise ValueError("need 0 < m_min < m_max")
        if self.max_points is not None and self.max_points < 1:
            raise ValueError("max_points must be >= 1")

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        """Build from string or typed values, ignoring ``None`` entries."""
        kinds = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in data.items():
            key = key.replace("-", "_")
            if key not in kinds:
                raise ValueError(f"unknown config key {key!r}")
            if raw is None:
                continue
            kind = kinds[key]
            if isinstance(raw, str):
                if "int" in kind:
                    raw = None if raw.lower() in ("", "none") else int(raw)
                elif "float" in kind:
                    raw = None if raw.lower() in ("", "none") else float(raw)
            kwargs[key] = raw
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def m_range(self) -> tuple[float, float]:
        return (self.m_min, self.m_max)


def estimate_stage(series: PriceSeries, cfg: RunConfig) -> estimation.VolatilityEstimate:
    series = rescale_time(series, cfg.time_span)
    grid = estimation.build_grid(series)
    est = estimation.ESTIMATORS[cfg.estimator](series, grid)
    est = estimation.confidence_interval(est, cfg.ci_level)
    return estimation.mark_reliable(est, cfg.min_visits, cfg.max_points)


def knots_of(est: estimation.VolatilityEstimate) -> tuple[np.ndarray, np.ndarray]:
    """Reliable ``(x_k, sigma_sq_k)`` pairs feeding interpolation and extrapolation."""
    kept = est.take(est.reliable)
    if len(kept) == 0:
        raise estimation.EstimationError("estimate has no reliable grid points")
    return kept.centers, kept.sigma_sq


def interpolate_stage(x, sigma_sq, cfg: RunConfig) -> dict[str, interpolation.BoundedCurve]:
    """All available curves plus the one selected as sigma^b under key ``"sigma_b"``."""
    sigma = np.sqrt(sigma_sq)
    curves = {}
    if x.size >= 2:
        curves["spline"] = interpolation.cubic_spline(x, sigma)
    try:
        curves["rkhs"] = interpolation.rkhs_interpolate(x, sigma, cfg.tau)
    except interpolation.InterpolationError:
        pass  # curve CSV then carries nan in the rkhs column
    curves["sigma_b"] = interpolation.interpolate(x, sigma, cfg.interpolator, cfg.tau)
    return curves


def extrapolate_stage(x, sigma_sq, sigma_b, cfg: RunConfig):
    """Optimised model plus the ``(m, J)`` scan table."""
    values = 1.0 / np.asarray(sigma_sq)
    ms = np.linspace(cfg.m_min, cfg.m_max, cfg.scan_points)
    scores = rkhs.m_scan(x, values, cfg.n, sigma_b, ms, cfg.mesh)
    _, model = rkhs.optimize_m(x, values, cfg.n, sigma_b, cfg.m_range, cfg.mesh, cfg.scan_points)
    return model, (ms, scores)


def verdict_stage(model: rkhs.ExtrapolationModel, est_info: dict, data: dict, cfg: RunConfig) -> verdict.Verdict:
    provenance = {
        "grid_size": int(model.size),
        "n": model.n,
        "m": model.m,
        "estimator": est_info["estimator"],
        "data": data,
    }
    return verdict.judge(model, cfg.epsilon, cfg.lower_bound, provenance=provenance)


def estimate_info(est: estimation.VolatilityEstimate) -> dict:
    x, _ = knots_of(est)
    return {
        "estimator": est.estimator,
        "grid_size": int(len(est)),
        "knots": int(x.size),
        "half_width_price": est.half_width_price,
    }


@dataclass
class DetectionResult:
    data: dict
    estimate: estimation.VolatilityEstimate
    curves: dict
    model: rkhs.ExtrapolationModel
    scan: tuple
    verdict: verdict.Verdict


def detect(series: PriceSeries, cfg: RunConfig | None = None) -> DetectionResult:
    """Run every stage in memory; see :mod:`slmbubble.cli` for the file-based runner."""
    cfg = cfg or RunConfig()
    data = summary(series).to_dict()
    est = estimate_stage(series, cfg)
    x, s2 = knots_of(est)
    curves = interpolate_stage(x, s2, cfg)
    model, scan = extrapolate_stage(x, s2, curves["sigma_b"], cfg)
    v = verdict_stage(model, estimate_info(est), data, cfg)
    return DetectionResult(data, est, curves, model, scan, v)


def output_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.output)
    path.mkdir(parents=True, exist_ok=True)
    return path
