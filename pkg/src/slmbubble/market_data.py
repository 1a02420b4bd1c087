"""
Price series ingestion.

Minute-bar exports are read from delimited text (comma or tab) with a header
row naming a timestamp column and at least one of the ``open``, ``high``,
``low``, ``close`` fields.  Timestamps may be ISO-8601 strings or epoch
seconds.  Observations are treated as equally spaced in model time; session
gaps are ignored.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

PRICE_FIELDS = ("open", "high", "low", "close")
TIMESTAMP_NAMES = ("timestamp", "time", "datetime", "date")


class MarketDataError(ValueError):
    """Raised for malformed or invalid price input."""


@dataclass(frozen=True)
class PriceSeries:
    """Positive prices on a uniform model-time grid.

    Parameters
    ----------
    timestamps : ndarray of float
        Strictly increasing observation instants, epoch seconds.
    prices : ndarray of float
        Positive prices.
    time_span : float
        Total model time ``T`` covered by the series.
    """

    timestamps: np.ndarray
    prices: np.ndarray
    time_span: float = 1.0
    field: str = "open"

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        px = np.asarray(self.prices, dtype=float)
        if ts.shape != px.shape or px.ndim != 1:
            raise MarketDataError("timestamps and prices must be 1-D arrays of equal length")
        if px.size < 2:
            raise MarketDataError(f"need at least 2 observations, got {px.size}")
        if not np.all(np.isfinite(px)) or np.any(px <= 0):
            raise MarketDataError("all prices must be finite and > 0")
        if np.any(np.diff(ts) <= 0):
            raise MarketDataError("timestamps must be strictly increasing")
        if not self.time_span > 0:
            raise MarketDataError("time_span must be > 0")
        ts.flags.writeable = False
        px.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "prices", px)

    @property
    def n(self) -> int:
        return self.prices.size

    @property
    def dt(self) -> float:
        return self.time_span / (self.n - 1)

    def __len__(self):
        return self.n


def _parse_timestamp(raw: str) -> float:
    raw = raw.strip()
    try:
        return float(raw)
    except ValueError:
        pass
    try:
        stamp = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError as exc:
        raise MarketDataError(f"unparseable timestamp {raw!r}") from exc
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.timestamp()


def parse_ticks(raw: str, field: str = "open", delimiter: str | None = None) -> PriceSeries:
    """Parse delimited minute-bar text and select one price column.

    The delimiter is sniffed between comma and tab unless given.  Rows are
    kept in file order and must already be in strictly increasing time.
    """
    field = field.lower()
    if field not in PRICE_FIELDS:
        raise MarketDataError(f"field must be one of {PRICE_FIELDS}, got {field!r}")
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    if not lines:
        raise MarketDataError("empty input")
    if delimiter is None:
        delimiter = "\t" if lines[0].count("\t") > lines[0].count(",") else ","
    reader = csv.reader(io.StringIO("\n".join(lines)), delimiter=delimiter)
    header = [h.strip().lower() for h in next(reader)]
    if field not in header:
        raise MarketDataError(f"header has no {field!r} column: {header}")
    ts_col = next((header.index(name) for name in TIMESTAMP_NAMES if name in header), None)
    if ts_col is None:
        raise MarketDataError(f"header has no timestamp column: {header}")
    px_col = header.index(field)

    stamps, prices = [], []
    for lineno, row in enumerate(reader, start=2):
        if len(row) <= max(ts_col, px_col):
            raise MarketDataError(f"line {lineno}: too few columns")
        stamps.append(_parse_timestamp(row[ts_col]))
        try:
            value = float(row[px_col])
        except ValueError as exc:
            raise MarketDataError(f"line {lineno}: non-numeric price {row[px_col]!r}") from exc
        if not np.isfinite(value) or value <= 0:
            raise MarketDataError(f"line {lineno}: non-positive price {value}")
        prices.append(value)

    stamps_arr = np.asarray(stamps)
    bad = np.flatnonzero(np.diff(stamps_arr) <= 0)
    if bad.size:
        raise MarketDataError(f"line {bad[0] + 3}: non-increasing timestamp")
    return PriceSeries(stamps_arr, np.asarray(prices), field=field)


def read_series(path: str | Path, field: str = "open") -> PriceSeries:
    """Read a price file, or standard input when *path* is ``-``."""
    if str(path) == "-":
        import sys

        return parse_ticks(sys.stdin.read(), field)
    return parse_ticks(Path(path).read_text(), field)


def write_series(series: PriceSeries, path: str | Path) -> None:
    """Write *series* in the format :func:`parse_ticks` reads.

    All four price fields carry the same value, timestamps are ISO-8601 UTC.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("timestamp",) + PRICE_FIELDS)
        for ts, px in zip(series.timestamps, series.prices):
            stamp = datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()
            value = repr(float(px))
            writer.writerow((stamp, value, value, value, value))


def rescale_time(series: PriceSeries, total: float = 1.0) -> PriceSeries:
    """Map the whole series onto ``[0, total]`` model time units."""
    if not total > 0:
        raise MarketDataError(f"total must be > 0, got {total}")
    return PriceSeries(series.timestamps, series.prices, time_span=float(total), field=series.field)


@dataclass(frozen=True)
class SeriesSummary:
    min: float
    max: float
    n: int
    first: float
    last: float

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max, "n": self.n, "first": self.first, "last": self.last}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def summary(series: PriceSeries) -> SeriesSummary:
    px = series.prices
    if px.size == 0:
        raise MarketDataError("empty series")
    return SeriesSummary(float(px.min()), float(px.max()), int(px.size), float(px[0]), float(px[-1]))
