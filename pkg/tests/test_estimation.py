import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slmbubble.estimation import (
    EstimationError,
    GridSpec,
    VolatilityEstimate,
    build_grid,
    confidence_interval,
    reliability_filter,
    smoothed_estimate,
    zmirou_estimate,
)
from slmbubble.market_data import PriceSeries, rescale_time
from slmbubble.simulate import SimSpec, simulate


def series_of(prices, span=1.0):
    prices = np.asarray(prices, float)
    return PriceSeries(np.arange(prices.size, dtype=float), prices, time_span=span)


def fake_estimate(visits, sigma_sq=1.0):
    visits = np.asarray(visits)
    k = visits.size
    s2 = np.where(visits > 0, sigma_sq, np.nan)
    return VolatilityEstimate(
        centers=np.arange(1.0, k + 1.0), visits=visits, effective_visits=visits.astype(float),
        sigma_sq=s2, ci_low=s2, ci_high=s2, reliable=visits > 0, estimator="zmirou", half_width_price=0.5,
    )


def test_grid_linkedin(linkedin):
    grid = build_grid(rescale_time(linkedin, 1.0))
    assert grid.size == 7
    assert grid.spacing == pytest.approx(6.85, abs=0.05)
    np.testing.assert_allclose(grid.centers[4:], [112.065, 118.915, 125.764], atol=0.05)


def test_grid_n1000_unit_range():
    # range [1, 2] stands in for [0, 1]: prices must be positive
    prices = np.linspace(1.0, 2.0, 1000)
    grid = build_grid(series_of(prices))
    assert grid.half_width == pytest.approx(0.1, rel=1e-12)
    np.testing.assert_allclose(grid.centers, 1.0 + np.array([0.1, 0.3, 0.5, 0.7, 0.9, 1.1]), rtol=1e-12)


def test_grid_smallest_case():
    grid = build_grid(series_of(np.linspace(2.0, 4.0, 8)))
    np.testing.assert_allclose(grid.centers, [2.0 + 0.5 * 2.0, 2.0 + 1.5 * 2.0], rtol=1e-12)


def test_grid_errors():
    with pytest.raises(EstimationError):
        build_grid(series_of(np.linspace(1, 2, 7)))
    with pytest.raises(EstimationError):
        build_grid(series_of(np.full(20, 3.0)))


@settings(max_examples=30, deadline=None)
@given(st.integers(8, 100_000))
def test_grid_spacing_and_bandwidth(n):
    prices = np.linspace(10.0, 30.0, n)
    grid = build_grid(series_of(prices))
    assert 0 < grid.half_width < 1
    np.testing.assert_allclose(np.diff(grid.centers), 2 * grid.half_width_price, rtol=1e-9)
    assert grid.centers[-1] + grid.half_width_price >= 30.0 - 1e-9


def test_zmirou_hand_computation():
    series = series_of([1.0, 1.1, 0.9])  # dt = 0.5
    grid = GridSpec(np.array([1.0]), 0.15 / 0.2, 0.15)
    est = zmirou_estimate(series, grid)
    assert est.visits.tolist() == [2]
    assert est.sigma_sq[0] == pytest.approx((0.1 ** 2 / 0.5 + 0.2 ** 2 / 0.5) / 2, rel=1e-12)
    assert est.sigma_sq[0] == pytest.approx(0.05, rel=1e-12)


def test_constant_series_gives_zero():
    series = series_of(np.full(10, 4.0))
    grid = GridSpec(np.array([4.0, 9.0]), 0.1, 0.5)
    for fn in (zmirou_estimate, smoothed_estimate):
        est = fn(series, grid)
        assert est.sigma_sq[0] == 0.0
        assert est.visits[1] == 0 and np.isnan(est.sigma_sq[1])


def test_boundary_tie_excluded():
    series = series_of([1.5, 2.0, 1.0])
    grid = GridSpec(np.array([1.0]), 0.5, 0.5)
    assert zmirou_estimate(series, grid).visits.tolist() == [0]


def test_estimators_agree_when_in_band_points_sit_on_center():
    series = series_of([1.0, 2.0, 1.0, 2.5, 1.0, 3.0, 1.0])
    grid = GridSpec(np.array([1.0]), 0.25, 0.5)
    z, s = zmirou_estimate(series, grid), smoothed_estimate(series, grid)
    assert z.visits[0] == 3
    assert s.sigma_sq[0] == z.sigma_sq[0]


def test_zmirou_shift_invariant_in_time():
    spec = SimSpec(0.3, 1.0, 1.0, 500, 1.0, 3)
    series = simulate(spec)
    moved = PriceSeries(series.timestamps + 12345.0, series.prices, time_span=series.time_span)
    grid = build_grid(series)
    np.testing.assert_array_equal(zmirou_estimate(series, grid).sigma_sq, zmirou_estimate(moved, grid).sigma_sq)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(1.0, 100.0), min_size=8, max_size=300))
def test_total_visits_bounded(prices):
    prices = np.asarray(prices)
    if prices.max() == prices.min():
        return
    series = series_of(prices)
    est = zmirou_estimate(series, build_grid(series))
    assert est.visits.sum() <= series.n - 1
    ok = est.visits > 0
    assert np.all(est.sigma_sq[ok] >= 0)
    assert np.all(np.isnan(est.sigma_sq[~ok]))


def test_confidence_interval_formula():
    # z(0.975) * sqrt(2/200) = 1.959964 * 0.1
    est = confidence_interval(fake_estimate([200]), 0.95)
    assert est.ci_low[0] == pytest.approx(1 - 0.1959964, abs=1e-6)
    assert est.ci_high[0] == pytest.approx(1 + 0.1959964, abs=1e-6)


def test_confidence_interval_clamps_and_shrinks():
    est = confidence_interval(fake_estimate([2], 0.05), 0.95)
    assert est.ci_low[0] == 0.0
    assert est.ci_low[0] <= est.sigma_sq[0] <= est.ci_high[0]
    widths = [np.ptp([e.ci_low[0], e.ci_high[0]]) for e in
              (confidence_interval(fake_estimate([n]), 0.95) for n in (10, 1000, 10 ** 6))]
    assert widths[0] > widths[1] > widths[2]
    assert widths[2] < 0.006
    with pytest.raises(EstimationError):
        confidence_interval(fake_estimate([5]), 1.0)


def test_reliability_filter():
    est = fake_estimate([50, 40, 30, 20, 5, 1, 0])
    assert len(reliability_filter(est, 2)) == 5
    full = fake_estimate([3, 4, 5])
    assert len(reliability_filter(full, 2)) == 3
    with pytest.raises(EstimationError):
        reliability_filter(fake_estimate([0, 0]), 2)
    with pytest.raises(EstimationError):
        reliability_filter(full, 0)


@pytest.mark.slow
@pytest.mark.parametrize("estimator", [zmirou_estimate, smoothed_estimate])
def test_gbm_within_twenty_percent(estimator):
    series = simulate(SimSpec(0.2, 1.0, 1.0, 100_000, 1.0, 11))
    est = estimator(series, build_grid(series))
    ok = est.visits >= 500
    assert ok.sum() >= 3
    ratio = est.sigma_sq[ok] / (0.2 * est.centers[ok]) ** 2
    assert np.all(np.abs(ratio - 1) <= 0.2)


@pytest.mark.slow
@pytest.mark.parametrize("theta", [0.5, 1.0, 1.5])
def test_consistency_over_seeds(theta):
    errors = []
    for seed in range(10):
        series = simulate(SimSpec(0.3, theta, 1.0, 100_000, 1.0, seed))
        est = zmirou_estimate(series, build_grid(series))
        ok = est.visits >= 500
        truth = (0.3 * est.centers[ok] ** theta) ** 2
        errors.append(np.median(np.abs(est.sigma_sq[ok] / truth - 1)))
    assert np.median(errors) <= 0.2
