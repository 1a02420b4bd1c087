"""
Grid and local volatility on the bundled intraday fixture
=========================================================

Builds the price grid for the synthetic minute-bar fixture and prints the
band estimate of the squared volatility at each grid point, with its
confidence interval and visit count.
"""
from importlib.resources import files

import numpy as np

from slmbubble.estimation import build_grid, confidence_interval, mark_reliable, zmirou_estimate
from slmbubble.market_data import read_series, rescale_time, summary

path = files("slmbubble") / "data" / "linkedin_format_fixture.csv"
series = rescale_time(read_series(str(path), "open"), 1.0)
print(summary(series).to_json())

# the bandwidth shrinks like n^(-1/3)
grid = build_grid(series)
print(f"{grid.size} grid points, spacing {grid.spacing:.4f}")

est = mark_reliable(confidence_interval(zmirou_estimate(series, grid)), min_visits=2)
np.set_printoptions(precision=4, suppress=True)
print(f"{'center':>10} {'visits':>7} {'sigma^2':>12} {'ci_low':>12} {'ci_high':>12} reliable")
for row in zip(est.centers, est.visits, est.sigma_sq, est.ci_low, est.ci_high, est.reliable):
    print("{:10.3f} {:7d} {:12.4f} {:12.4f} {:12.4f} {}".format(*row))
