"""
Bubble verdict from the extrapolated tail.

For ``sigma(x) ~ C x**alpha`` the integral ``int_a^inf x / sigma(x)**2 dx``
is finite iff ``alpha > 1``.  Values of ``alpha`` within ``epsilon`` of 1 are
reported as indeterminate.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from scipy.integrate import quad

from .rkhs import ExtrapolationModel, asymptotic_limit

SCHEMA_VERSION = "1.0"
DEFAULT_EPSILON = 0.05


class VerdictError(ValueError):
    pass


class Classification(str, enum.Enum):
    BUBBLE = "Bubble"
    NO_BUBBLE = "NoBubble"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Verdict:
    alpha: float
    classification: Classification
    band: float
    integral_finite: bool
    integral_value: float
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "classification": self.classification.value,
            "band": self.band,
            "integral_finite": self.integral_finite,
            "integral_value": None if not np.isfinite(self.integral_value) else self.integral_value,
            "provenance": self.provenance,
        }


def alpha_from_m(m: float) -> float:
    return (1.0 + m) / 2.0


def classify(alpha: float, epsilon: float = DEFAULT_EPSILON) -> Classification:
    if epsilon < 0:
        raise VerdictError(f"epsilon must be >= 0, got {epsilon}")
    if alpha > 1.0 + epsilon:
        return Classification.BUBBLE
    if alpha < 1.0 - epsilon:
        return Classification.NO_BUBBLE
    return Classification.INDETERMINATE


def integral_test(model: ExtrapolationModel, a: float, split: float | None = None) -> tuple[bool, float]:
    """Decide whether ``int_a^inf x f(x) dx`` is finite.

    The bounded part ``[a, split]`` is integrated numerically; beyond *split*
    the tail ``L x^-(m+1)`` is integrated analytically.  Returns
    ``(finite, value)`` with ``value = inf`` when divergent.
    """
    x_max = float(model.knots[-1])
    split = 10.0 * x_max if split is None else float(split)
    if not a > 0:
        raise VerdictError(f"lower bound a must be > 0, got {a}")
    if split < x_max:
        raise VerdictError(f"split {split} must be >= largest knot {x_max}")
    lo, hi = min(a, split), split
    probe = np.union1d(np.geomspace(lo, hi, 2000), model.knots[(model.knots > lo) & (model.knots < hi)])
    if np.any(model.f(probe) <= 0):
        raise VerdictError(f"f <= 0 on [{lo:.6g}, {hi:.6g}]")
    if model.m <= 1.0:
        return False, float("inf")
    limit = asymptotic_limit(model)
    if a >= split:
        return True, float(limit * a ** (1.0 - model.m) / (model.m - 1.0))
    tail = limit * split ** (1.0 - model.m) / (model.m - 1.0)
    breaks = model.knots[(model.knots > a) & (model.knots < split)]
    body, _ = quad(lambda x: x * model.f(x), a, split, points=breaks if breaks.size else None,
                   limit=200, epsabs=0.0, epsrel=1e-10)
    return True, float(body + tail)


def judge(model: ExtrapolationModel, epsilon: float = DEFAULT_EPSILON, a: float | None = None,
          split: float | None = None, provenance: dict | None = None) -> Verdict:
    """Classify *model* and run the integral diagnostic at lower bound *a*."""
    a = float(model.knots[0]) if a is None else a
    alpha = alpha_from_m(model.m)
    finite, value = integral_test(model, a, split)
    return Verdict(alpha, classify(alpha, epsilon), epsilon, finite, value, dict(provenance or {}))


REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "created", "data", "estimate", "model", "verdict", "config", "artifacts"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "created": {"type": "string"},
        "data": {
            "type": "object",
            "required": ["min", "max", "n", "first", "last"],
        },
        "estimate": {
            "type": "object",
            "required": ["estimator", "grid_size", "knots", "half_width_price"],
        },
        "model": {
            "type": "object",
            "required": ["n", "m", "knots", "values", "coefficients"],
        },
        "verdict": {
            "type": "object",
            "required": ["alpha", "classification", "band", "integral_finite", "provenance"],
            "properties": {"classification": {"enum": [c.value for c in Classification]}},
        },
        "config": {"type": "object"},
        "artifacts": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}


def report(series_summary: dict, estimate: dict, model: ExtrapolationModel, verdict: Verdict,
           run_config: dict, artifacts: dict | None = None, created: str | None = None) -> str:
    """Assemble the JSON report.

    Output is deterministic apart from the ``created`` timestamp.  *artifacts*
    maps table names to paths relative to the report file.
    """
    import jsonschema

    for name, part in (("data summary", series_summary), ("estimate", estimate), ("run config", run_config)):
        if part is None:
            raise VerdictError(f"missing stage output: {name}")
    if model is None or verdict is None:
        raise VerdictError("missing stage output: model/verdict")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "created": created or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "data": series_summary,
        "estimate": estimate,
        "model": model.to_dict(),
        "verdict": verdict.to_dict(),
        "config": run_config,
        "artifacts": dict(artifacts or {}),
    }
    jsonschema.validate(doc, REPORT_SCHEMA)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
