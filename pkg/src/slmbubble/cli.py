"""
Command-line entry point.

Subcommands: ``detect``, ``simulate``, ``estimate``, ``interpolate``,
``extrapolate``, ``report``.  Options come from flags, then an optional
``--config`` file of ``key = value`` lines, then defaults.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import pipeline, tables, verdict
from .market_data import read_series, summary, write_series
from .pipeline import RunConfig
from .simulate import RNG_ALGORITHM, SimSpec, simulate

ESTIMATE_FILE = "estimate.csv"
SUMMARY_FILE = "summary.json"
CURVE_FILE = "curve.csv"
SCAN_FILE = "mscan.csv"
EXTRAPOLATION_FILE = "extrapolation.csv"
MODEL_FILE = "model.json"
REPORT_FILE = "report.json"


class StageError(RuntimeError):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage


class _stage:
    """Context manager re-raising any failure tagged with the stage name."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def read_config_file(path) -> dict:
    """Parse flat ``key = value`` text; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve_config(args) -> RunConfig:
    merged = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            merged[f.name] = value
    return RunConfig.from_mapping(merged)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--output", "-o", help="output directory (default: out)")
    p.add_argument("--field", choices=("open", "high", "low", "close"))
    p.add_argument("--time-span", dest="time_span", type=float)
    p.add_argument("--estimator", choices=("zmirou", "smoothed"))
    p.add_argument("--ci-level", dest="ci_level", type=float)
    p.add_argument("--min-visits", dest="min_visits", type=int)
    p.add_argument("--max-points", dest="max_points", type=int, help="keep at most this many leading grid points")
    p.add_argument("--interpolator", choices=("spline", "rkhs"))
    p.add_argument("--tau", type=float)
    p.add_argument("-n", "--smoothness", dest="n", type=int)
    p.add_argument("--m-min", dest="m_min", type=float)
    p.add_argument("--m-max", dest="m_max", type=float)
    p.add_argument("--scan-points", dest="scan_points", type=int)
    p.add_argument("--mesh", type=int)
    p.add_argument("--curve-mesh", dest="curve_mesh", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--lower-bound", dest="lower_bound", type=float)


# stage writers shared by `detect` and the stage-wise subcommands


def _write_estimate_stage(series, cfg, out: Path):
    with _stage("estimate"):
        est = pipeline.estimate_stage(series, cfg)
        tables.write_estimate(est, out / ESTIMATE_FILE)
        doc = {"data": summary(series).to_dict(), "estimate": pipeline.estimate_info(est)}
        tables.write_json(out / SUMMARY_FILE, doc, tables.SUMMARY_SCHEMA)
    return est


def _load_knots(path):
    with _stage("read-estimate"):
        x, s2 = tables.reliable_knots(tables.read_estimate(path))
        if np.any(~np.isfinite(s2)) or np.any(s2 <= 0):
            raise tables.SchemaError(f"{path}: reliable rows need positive sigma_sq")
        return x, s2


def _write_curve_stage(x, s2, cfg, out: Path):
    with _stage("interpolate"):
        curves = pipeline.interpolate_stage(x, s2, cfg)
        grid = curves["sigma_b"].mesh(cfg.curve_mesh)
        spline = curves["spline"](grid) if "spline" in curves else np.full(grid.size, np.nan)
        kernel = curves["rkhs"](grid) if "rkhs" in curves else np.full(grid.size, np.nan)
        tables.write_table(out / CURVE_FILE, tables.CURVE_COLUMNS, zip(grid, spline, kernel))
    return curves


def _write_extrapolation_stage(x, s2, sigma_b, cfg, out: Path):
    with _stage("extrapolate"):
        model, (ms, scores) = pipeline.extrapolate_stage(x, s2, sigma_b, cfg)
        tables.write_table(
            out / SCAN_FILE, tables.SCAN_COLUMNS,
            ((m, j if np.isfinite(j) else np.nan, bool(np.isfinite(j))) for m, j in zip(ms, scores)),
        )
        grid = np.geomspace(x[0] / 2.0, 10.0 * x[-1], cfg.curve_mesh)
        fx = model.f(grid)
        with np.errstate(invalid="ignore"):
            sig = np.where(fx > 0, fx, np.nan) ** -0.5
        tables.write_table(out / EXTRAPOLATION_FILE, tables.EXTRAPOLATION_COLUMNS, zip(grid, fx, sig))
        tables.write_model(model, out / MODEL_FILE)
    return model


def _write_report_stage(summary_doc, model, cfg, out: Path):
    with _stage("report"):
        v = pipeline.verdict_stage(model, summary_doc["estimate"], summary_doc["data"], cfg)
        artifacts = {
            "estimate": ESTIMATE_FILE,
            "summary": SUMMARY_FILE,
            "curve": CURVE_FILE,
            "m_scan": SCAN_FILE,
            "extrapolation": EXTRAPOLATION_FILE,
            "model": MODEL_FILE,
        }
        settings = {k: val for k, val in cfg.to_dict().items() if k != "output"}
        text = verdict.report(summary_doc["data"], summary_doc["estimate"], model, v, settings, artifacts)
        (out / REPORT_FILE).write_text(text)
    return v


def cmd_detect(args) -> int:
    with _stage("config"):
        cfg = resolve_config(args)
    with _stage("read"):
        series = read_series(args.input, cfg.field)
    out = pipeline.output_dir(cfg)
    _write_estimate_stage(series, cfg, out)
    x, s2 = _load_knots(out / ESTIMATE_FILE)
    curves = _write_curve_stage(x, s2, cfg, out)
    model = _write_extrapolation_stage(x, s2, curves["sigma_b"], cfg, out)
    summary_doc = tables.read_json(out / SUMMARY_FILE, tables.SUMMARY_SCHEMA)
    v = _write_report_stage(summary_doc, model, cfg, out)
    print(json.dumps({"classification": v.classification.value, "alpha": v.alpha, "m": model.m,
                      "report": str(out / REPORT_FILE)}))
    return 0


def cmd_estimate(args) -> int:
    with _stage("config"):
        cfg = resolve_config(args)
    with _stage("read"):
        series = read_series(args.input, cfg.field)
    out = pipeline.output_dir(cfg)
    _write_estimate_stage(series, cfg, out)
    print(summary(series).to_json())
    return 0


def cmd_interpolate(args) -> int:
    with _stage("config"):
        cfg = resolve_config(args)
    x, s2 = _load_knots(args.estimate)
    _write_curve_stage(x, s2, cfg, pipeline.output_dir(cfg))
    return 0


def cmd_extrapolate(args) -> int:
    with _stage("config"):
        cfg = resolve_config(args)
    x, s2 = _load_knots(args.estimate)
    with _stage("interpolate"):
        sigma_b = pipeline.interpolate_stage(x, s2, cfg)["sigma_b"]
    model = _write_extrapolation_stage(x, s2, sigma_b, cfg, pipeline.output_dir(cfg))
    print(json.dumps({"n": model.n, "m": model.m, "alpha": verdict.alpha_from_m(model.m), "knots": model.size}))
    return 0


def cmd_report(args) -> int:
    with _stage("config"):
        cfg = resolve_config(args)
    with _stage("read-stage-files"):
        summary_doc = tables.read_json(args.summary, tables.SUMMARY_SCHEMA)
        model = tables.read_model(args.model)
    out = pipeline.output_dir(cfg)
    v = _write_report_stage(summary_doc, model, cfg, out)
    print(json.dumps({"classification": v.classification.value, "alpha": v.alpha}))
    return 0


def cmd_simulate(args) -> int:
    with _stage("simulate"):
        spec = SimSpec(args.sigma0, args.theta, args.s0, args.steps, args.horizon, args.seed)
        series = simulate(spec)
        write_series(series, args.out)
    print(json.dumps({"path": args.out, "steps": spec.steps, "seed": spec.seed, "rng": RNG_ALGORITHM}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slmbubble", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run the full pipeline on a price file")
    p.add_argument("input", help="price file, or - for stdin")
    _add_config_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("estimate", help="grid and volatility estimates")
    p.add_argument("input")
    _add_config_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("interpolate", help="sigma^b curves from an estimate table")
    p.add_argument("estimate")
    _add_config_flags(p)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("extrapolate", help="optimise m and fit the tail model")
    p.add_argument("estimate")
    _add_config_flags(p)
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("report", help="verdict and JSON report from stage files")
    p.add_argument("--summary", required=True)
    p.add_argument("--model", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("simulate", help="write a simulated price file")
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--s0", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"slmbubble: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
