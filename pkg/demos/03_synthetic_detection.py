"""
Detecting bubbles in simulated prices
=====================================

Simulates ``dS = S^theta dW`` for a strict local martingale (theta = 2) and
a true martingale (theta = 0.5), runs the full pipeline on each and prints
the estimated tail exponent next to the true one.
"""
from slmbubble.pipeline import RunConfig, detect
from slmbubble.simulate import SimSpec, ground_truth_alpha, simulate

cfg = RunConfig(estimator="smoothed", interpolator="spline", min_visits=50)

for theta in (2.0, 0.5):
    for seed in (1, 2, 3):
        spec = SimSpec(sigma0=1.0, theta=theta, s0=1.0, steps=50_000, horizon=1.0, seed=seed)
        result = detect(simulate(spec), cfg)
        print(f"theta={theta} seed={seed}: knots={result.model.size} "
              f"alpha={result.verdict.alpha:.3f} (true {ground_truth_alpha(spec)}) "
              f"-> {result.verdict.classification.value}")
