# Exact pebbling numbers, witnesses and the product inequality on small graphs.
# Run with: python3 notebooks/02_pebbling_numbers.py

# %%
from pebblelab.graph import complete, cycle, hypercube, path, petersen
from pebblelab.pebbling import graham_check, is_r_solvable, pebbling_number, replay

for g in [complete(5), path(5), cycle(5), cycle(6), petersen(), hypercube(3)]:
    r = pebbling_number(g)
    print(f"{g.label:>8}  pi={r.pi:<3} n={g.n:<3} unsolvable witness {r.witness_config} for root {r.witness_root}")

# %% a single decision, with the move sequence that reaches the root
v = is_r_solvable(path(4), (8, 0, 0, 0), 3)
print(v.status.value, v.witness, "->", replay(path(4), (8, 0, 0, 0), v.witness))

# %% the weight argument certifies failure without search when the weight is below 1
v = is_r_solvable(path(4), (7, 0, 0, 0), 3)
print(v.status.value, v.certificate)

# %% a product spot check
rep = graham_check(path(3), cycle(4))
print("pi(P3 x C4) =", rep.pi_product.pi, "<=", rep.bound, rep.holds)
