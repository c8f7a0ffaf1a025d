# Graph families, products and their invariants.
# Run with: python3 notebooks/01_graph_metrics.py

# %%
from pebblelab.graph import cartesian_product, cycle, grid, metrics, path, petersen, product_disjoint_paths

for g in [path(5), cycle(6), grid(3, 2), petersen()]:
    m = metrics(g)
    print(f"{g.label:>10}  n={g.n:<3} diam={m.diameter} girth={m.girth} min_deg={m.min_degree} kappa={m.connectivity}")

# %% products: degrees add, and connectivity is at least the smaller minimum degree
g, h = cycle(4), path(3)
p = cartesian_product(g, h)
print(p.label, "edges", p.edge_count, "kappa", metrics(p).connectivity)

# %% internally disjoint paths between two product vertices, built from the factors
for route in product_disjoint_paths(g, h, (0, 0), (2, 2)):
    print(" -> ".join(f"({v // h.n},{v % h.n})" for v in route))
