"""
File schemas for stage outputs.

Every table is comma-separated with a fixed header; floats are written with
``repr`` so a write/read cycle is exact.  Missing numbers are written as
``nan``.  JSON documents are validated with jsonschema on write and read.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import jsonschema
import numpy as np

from .estimation import VolatilityEstimate
from .rkhs import ExtrapolationModel

ESTIMATE_COLUMNS = ("center", "visits", "sigma_sq", "ci_low", "ci_high", "reliable")
CURVE_COLUMNS = ("x", "sigma_spline", "sigma_rkhs")
SCAN_COLUMNS = ("m", "J", "feasible")
EXTRAPOLATION_COLUMNS = ("x", "f", "sigma")

MODEL_SCHEMA = {
    "type": "object",
    "required": ["n", "m", "knots", "values", "coefficients"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "number", "exclusiveMinimum": 0},
        "knots": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "values": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "coefficients": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    },
}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["data", "estimate"],
    "properties": {
        "data": {
            "type": "object",
            "required": ["min", "max", "n", "first", "last"],
            "properties": {"n": {"type": "integer", "minimum": 2}},
        },
        "estimate": {
            "type": "object",
            "required": ["estimator", "grid_size", "knots", "half_width_price"],
            "properties": {"estimator": {"enum": ["zmirou", "smoothed"]}},
        },
    },
}


class SchemaError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    return "nan" if np.isnan(value) else repr(value)


def write_table(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise SchemaError(f"{path}: row has {len(row)} fields, expected {len(columns)}")
            out.writerow([_fmt(v) for v in row])


def read_table(path, columns) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    if tuple(rows[0]) != tuple(columns):
        raise SchemaError(f"{path}: header {rows[0]} does not match {list(columns)}")
    body = rows[1:]
    for i, row in enumerate(body, start=2):
        if len(row) != len(columns):
            raise SchemaError(f"{path}: line {i} has {len(row)} fields, expected {len(columns)}")
    return body


def _bool(text: str) -> bool:
    if text not in ("true", "false"):
        raise SchemaError(f"expected true/false, got {text!r}")
    return text == "true"


def write_estimate(est: VolatilityEstimate, path) -> None:
    rows = zip(est.centers, est.visits, est.sigma_sq, est.ci_low, est.ci_high, est.reliable)
    write_table(path, ESTIMATE_COLUMNS, rows)


def read_estimate(path) -> dict[str, np.ndarray]:
    """Columns of an estimate table as arrays."""
    body = read_table(path, ESTIMATE_COLUMNS)
    if not body:
        raise SchemaError(f"{path}: no grid rows")
    try:
        out = {
            "center": np.array([float(r[0]) for r in body]),
            "visits": np.array([int(r[1]) for r in body]),
            "sigma_sq": np.array([float(r[2]) for r in body]),
            "ci_low": np.array([float(r[3]) for r in body]),
            "ci_high": np.array([float(r[4]) for r in body]),
            "reliable": np.array([_bool(r[5]) for r in body]),
        }
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if np.any(np.diff(out["center"]) <= 0):
        raise SchemaError(f"{path}: centers not ascending")
    return out


def reliable_knots(table: dict) -> tuple[np.ndarray, np.ndarray]:
    keep = table["reliable"]
    if not keep.any():
        raise SchemaError("estimate table has no reliable rows")
    return table["center"][keep], table["sigma_sq"][keep]


def write_json(path, doc: dict, schema: dict) -> None:
    jsonschema.validate(doc, schema)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_json(path, schema: dict) -> dict:
    doc = json.loads(Path(path).read_text())
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"{path}: {exc.message}") from exc
    return doc


def write_model(model: ExtrapolationModel, path) -> None:
    write_json(path, model.to_dict(), MODEL_SCHEMA)


def read_model(path) -> ExtrapolationModel:
    return ExtrapolationModel.from_dict(read_json(path, MODEL_SCHEMA))
