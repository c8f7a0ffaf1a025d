# Random configurations: uniform multisets, solvability curves and threshold brackets.
# Run with: python3 notebooks/03_random_thresholds.py

# %%
import numpy as np

from pebblelab.graph import grid, path
from pebblelab.random_model import (
    estimate_solvability,
    exact_crossing,
    exact_solvability_probability,
    find_threshold,
    make_stream,
    monotone_smooth,
    sample_configuration,
    sweep,
)

stream = make_stream(7)
print([sample_configuration(4, 6, stream).counts for _ in range(5)])

# %% exact curve and Monte Carlo estimates side by side on P4
g = path(4)
for t in range(1, 9):
    est = estimate_solvability(g, t, 1000, seed=1)
    exact = float(exact_solvability_probability(g, t))
    print(f"t={t}  exact={exact:.3f}  p_hat={float(est.p_hat):.3f}  ci=[{est.ci_low:.3f}, {est.ci_high:.3f}]")

# %% smoothing a noisy sweep on the 3x3 grid and bracketing the 0.5 crossing
g = grid(3, 2)
ests = sweep(g, range(1, 17), 300, seed=2)
raw = np.array([float(e.p_hat) for e in ests])
print("raw     ", np.round(raw, 2))
print("smoothed", np.round(monotone_smooth(raw), 2))
b = find_threshold(g, 0.5, 300, seed=2)
print("bracket", (b.t_low, b.t_high), "exact crossing", exact_crossing(g))
