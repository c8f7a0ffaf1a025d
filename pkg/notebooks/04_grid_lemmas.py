# Blocks, boundary counts and occupancy events on small grids.
# Run with: python3 notebooks/04_grid_lemmas.py

# %%
from pebblelab.grid import (
    GridParams,
    amass_bound,
    block_partition,
    boundary_counts,
    hole_argument_check,
    run_flat_experiment,
    run_full_experiment,
    run_hole_experiment,
    sum_lemma,
)

print(block_partition(4, 2, 2).blocks)

# %% lattice points at distance i from a box boundary, against the binomial bound
for b in boundary_counts(2, 4, 6):
    print(f"d=2 m=4 i={b.i}: exact {b.exact:4d}  bound {b.bound:4d}")

# %% the geometric sum approaches 2^j from below
for j in (1, 3, 8):
    partial, limit = sum_lemma(j, 64)
    print(f"j={j}: 2^j - partial = {float(limit - partial):.3e}")

# %% resolved parameters for the two suites
print(GridParams.lower(16, 1, c=0.5, eps=0.1, delta=0.1).to_dict())
print(GridParams.upper(16, 1, eps=0.1).to_dict())

# %% Monte Carlo frequencies next to exact references
for r in [
    run_hole_experiment(12, 1, 3, 12, 5000, seed=1),
    run_flat_experiment(12, 1, trials=5000, seed=1, t=24, p=8),
    run_full_experiment(12, 1, 3, 24, 3, 5000, seed=1),
]:
    print(f"{r.experiment:>4}: freq {r.event_frequency:.4f}  exact {float(r.exact_reference):.4f}  within 3 sigma {r.within(3)}")

# %% an empty block whose centre cannot be reached when few pebbles can be amassed
print("p(m+4)^d =", amass_bound(3, 12, 1), "< 2^(m/2) =", 2**6)
print(hole_argument_check(24, 1, 12, 3, 6, 200, seed=1))
