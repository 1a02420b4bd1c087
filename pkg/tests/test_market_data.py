import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slmbubble.market_data import (
    MarketDataError,
    PriceSeries,
    parse_ticks,
    rescale_time,
    summary,
    write_series,
)


def _csv(prices, delimiter=","):
    rows = [delimiter.join(["timestamp", "open", "close"])]
    for i, p in enumerate(prices):
        rows.append(delimiter.join([str(1305811800 + 60 * i), str(p), str(p + 1)]))
    return "\n".join(rows) + "\n"


def test_parse_two_rows():
    series = parse_ticks("timestamp,open\n2011-05-19T09:30:00,100.0\n2011-05-19T09:31:00,101.0\n", "open")
    assert series.prices.tolist() == [100.0, 101.0]
    assert series.n == 2


def test_parse_selects_field_and_tab_delimiter():
    series = parse_ticks(_csv([5.0, 6.0, 7.0], "\t"), "close")
    assert series.prices.tolist() == [6.0, 7.0, 8.0]
    assert series.field == "close"


def test_parse_epoch_timestamps():
    series = parse_ticks("time,high\n0,1.5\n60,1.6\n120,1.7\n", "high")
    assert series.timestamps.tolist() == [0.0, 60.0, 120.0]


def test_linkedin_fixture_count(linkedin):
    assert linkedin.n == 1535


@pytest.mark.parametrize(
    "text, message",
    [
        ("timestamp,open\n2011-05-19T09:30:00,1\n2011-05-19T09:30:00,2\n", "non-increasing"),
        ("timestamp,close\n0,1\n60,2\n", "no 'open' column"),
        ("timestamp,open\n0,1\n60,-2\n", "non-positive"),
        ("timestamp,open\n0,1\n60,abc\n", "non-numeric"),
        ("timestamp,open\n0,1\n", "at least 2"),
        ("timestamp,open\n60,1\n0,2\n", "non-increasing"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(MarketDataError, match=message):
        parse_ticks(text, "open")


def test_rescale_time():
    series = parse_ticks(_csv([1.0, 2.0, 3.0]))
    assert rescale_time(series, 2.0).dt == 1.0
    with pytest.raises(MarketDataError):
        rescale_time(series, 0.0)


def test_rescale_linkedin_unit_time(linkedin):
    assert rescale_time(linkedin, 1.0).dt == pytest.approx(1.0 / 1534, rel=1e-15)


def test_series_needs_two_points():
    with pytest.raises(MarketDataError):
        PriceSeries(np.array([0.0]), np.array([1.0]))


def test_summary(linkedin):
    s = summary(linkedin)
    assert (s.min, s.max, s.n) == (81.24, 120.74, 1535)
    flat = PriceSeries(np.arange(3.0), np.full(3, 5.0))
    assert summary(flat).to_dict() == {"min": 5.0, "max": 5.0, "n": 3, "first": 5.0, "last": 5.0}
    s2 = summary(PriceSeries(np.arange(2.0), np.array([1.0, 2.0])))
    assert (s2.min, s2.max) == (1.0, 2.0)
    assert json.loads(s2.to_json())["n"] == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 1e4, allow_nan=False), min_size=2, max_size=50),
       st.floats(0.01, 100.0))
def test_roundtrip_count_and_rescale_invariance(prices, total):
    series = parse_ticks(_csv(prices))
    assert summary(series).n == len(prices)
    scaled = rescale_time(series, total)
    assert np.array_equal(scaled.prices, series.prices)
    assert scaled.n == series.n


def test_write_series_roundtrip(tmp_path):
    series = PriceSeries(946684800.0 + 60.0 * np.arange(4), np.array([1.0, 1.25, 0.3333333333333333, 2.0]))
    path = tmp_path / "s.csv"
    write_series(series, path)
    for field in ("open", "high", "low", "close"):
        back = parse_ticks(path.read_text(), field)
        assert np.array_equal(back.prices, series.prices)
        assert np.array_equal(back.timestamps, series.timestamps)
