# Building a graph of girth >= g and diameter <= g-1 from a sparse random graph.
# Run with: python3 notebooks/05_girth_construction.py

# %%
from pebblelab.girth import construct_candidate, sample_gnp, short_cycle_census

g0 = sample_gnp(60, 60 ** (-1 + 1 / 4), seed=3)
print("random graph edges", g0.edge_count, "triangles", len(short_cycle_census(g0, 3)))

# %% the full pipeline, with statistics after each stage
final, report = construct_candidate(300, 5, seed=1)
for s in report.stages:
    print(f"{s.name:>15}: {s.vertices:4d} vertices {s.edges:5d} edges  min degree {s.min_degree}")
print("girth", report.final_girth, "diameter", report.final_diameter, "certified", report.certified)

# %% small outputs can also be pebbled exactly
final, report = construct_candidate(20, 4, seed=1, check_class0=True)
print(final, report.pebbling)
