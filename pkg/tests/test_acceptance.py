"""One test per acceptance criterion, each printing a pass/fail line.

Every run uses the fixed seed SEED, picked once before the first run.
"""

import collections
import itertools
import math
import random
import time
from fractions import Fraction

import networkx as nx
import pytest
from scipy import stats

import oracles
from conftest import random_connected_graph, record
from pebblelab.graph import (
    Graph,
    cartesian_product,
    complete,
    cycle,
    diameter,
    format_graph,
    grid,
    metrics,
    path,
    product_disjoint_paths,
    star,
    vertex_connectivity,
)
from pebblelab.girth import construct_candidate
from pebblelab.grid import (
    boundary_counts,
    prob_all_full,
    prob_block_empty,
    prob_not_flat,
    prob_some_block_empty,
    r_i_exact,
    run_flat_experiment,
    run_full_experiment,
    run_hole_experiment,
    sum_lemma,
)
from pebblelab.pebbling import pebbling_number
from pebblelab.random_model import (
    estimate_solvability,
    exact_crossing,
    exact_solvability_probability,
    find_threshold,
    make_stream,
    monotone_smooth,
    multiset_coefficient,
    occupancy_tail_exact,
    raw_violations,
    sample_configuration,
    sweep,
    violations_within_noise,
)

SEED = 20240917

pytestmark = pytest.mark.acceptance


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def test_c1_exact_pebbling_numbers():
    cases = [(complete(n), n) for n in range(2, 7)] + [(path(n), 2 ** (n - 1)) for n in range(2, 7)] + [(cycle(6), 8)]
    worst, wrong = 0.0, []
    for g, expected in cases:
        start = time.perf_counter()
        result = pebbling_number(g)
        worst = max(worst, time.perf_counter() - start)
        if result.pi != expected:
            wrong.append((g.label, result.pi, expected))
    c5 = pebbling_number(cycle(5)).pi
    ok = not wrong and worst < 60 and c5 is not None and c5 >= 2 ** (5 // 2)
    record(1, ok, f"K2..K6, P2..P6, C6=8 exact; pi(C5)={c5} >= {2 ** (5 // 2)}; slowest {worst:.2f}s; wrong={wrong}")
    assert ok


def test_c2_diameter_two_dichotomy():
    start = time.perf_counter()
    scanned, bad = 0, []
    for h in nx.graph_atlas_g():
        n = h.number_of_nodes()
        if n < 2 or n > 7 or not nx.is_connected(h) or nx.diameter(h) != 2:
            continue
        g = Graph.from_edges(n, h.edges())
        assert diameter(g) == 2
        scanned += 1
        pi = pebbling_number(g).pi
        if pi not in (n, n + 1):
            bad.append((sorted(h.edges()), pi))
    # the atlas holds every graph up to isomorphism on at most 7 vertices
    ok = scanned > 400 and not bad
    record(2, ok, f"{scanned} diameter-2 graphs, pi in {{n, n+1}} for all, {len(bad)} exceptions, {time.perf_counter() - start:.1f}s")
    assert ok


def test_c3_graham_pairs():
    factors = [complete(2), complete(3), path(2), path(3), path(4), cycle(4)]
    pi = {}
    for g in factors:
        pi[g] = pebbling_number(g)
    start = time.perf_counter()
    checked, failed, slacks = 0, [], {}
    for g, h in itertools.combinations_with_replacement(factors, 2):
        prod = cartesian_product(g, h)
        assert prod.n <= 16
        pp = pebbling_number(prod)
        holds = pp.exact and pp.pi <= pi[g].pi * pi[h].pi
        checked += 1
        slacks[prod.label] = (pi[g].pi * pi[h].pi - pp.pi) if pp.exact else None
        if not holds:
            failed.append((prod.label, str(pp)))
    ok = checked == 21 and not failed
    tight = sorted(k for k, v in slacks.items() if v == 0)
    record(3, ok, f"{checked} pairs, {len(failed)} violations or undecided, tight: {', '.join(tight)}, {time.perf_counter() - start:.1f}s")
    assert ok


def test_c4_diameter_and_connectivity_lemmas():
    rng = random.Random(SEED)
    diam_bad = 0
    for _ in range(1000):
        n = rng.randint(2, 10)
        g = random_connected_graph(rng, n, rng.random() * 0.6)
        if diameter(g) > 3 * n / g.min_degree + 3:
            diam_bad += 1
    conn_bad = path_bad = 0
    path_checks = 0
    for _ in range(200):
        g = random_connected_graph(rng, rng.randint(2, 5), rng.random())
        h = random_connected_graph(rng, rng.randint(2, 5), rng.random())
        prod = cartesian_product(g, h)
        need = min(g.min_degree, h.min_degree)
        kappa = vertex_connectivity(prod)
        if kappa < need or kappa != nx.node_connectivity(_nx(prod)):
            conn_bad += 1
        for v, w in itertools.permutations(range(prod.n), 2):
            path_checks += 1
            paths = product_disjoint_paths(g, h, v, w)
            inner = [set(p[1:-1]) for p in paths]
            good = (
                len(paths) == need
                and all(p[0] == v and p[-1] == w and len(set(p)) == len(p) for p in paths)
                and all(prod.has_edge(a, b) for p in paths for a, b in zip(p, p[1:]))
                and all(not (a & b) for a, b in itertools.combinations(inner, 2))
                and len({tuple(p) for p in paths}) == len(paths)
            )
            path_bad += not good
    ok = diam_bad == conn_bad == path_bad == 0
    record(4, ok, f"1000 graphs: {diam_bad} diameter violations; 200 products: {conn_bad} connectivity violations; "
                  f"{path_checks} disjoint-path families, {path_bad} bad")
    assert ok


def test_c5_boundary_counts():
    rows = [b for d in (1, 2, 3) for m in (2, 4) for b in boundary_counts(d, m, 6)]
    over = [b for b in rows if not b.holds]
    d1 = all(r_i_exact(1, m, i) == 2 for m in (1, 2, 3, 4, 5, 6) for i in range(1, 11))
    ok = not over and d1
    record(5, ok, f"{len(rows)} (d, m, i) cases, {len(over)} with exact > bound; d=1 exact value 2: {d1}")
    assert ok


@pytest.mark.parametrize("j", range(1, 9))
def test_c6_geometric_sum(j):
    prev = Fraction(0)
    increasing = True
    for n in range(65):
        partial, limit = sum_lemma(j, n)
        increasing &= partial > prev
        prev = partial
    below = partial < limit
    gap = limit - partial
    tol = Fraction(limit, 2**50)
    close = gap <= tol
    ok = below and increasing and close
    record(6, ok, f"j={j}: partial<2^j {below}, gap {float(gap):.3e} vs tolerance 2^j 2^-50 = {float(tol):.3e}")
    assert below and increasing
    assert close, f"partial sum with 64 terms is {float(gap):.3e} below 2^{j}, more than 2^{j} 2^-50"


def test_c7_sampler_and_model():
    chi = {}
    for n, t in [(2, 2), (3, 2), (3, 3), (4, 3)]:
        stream = make_stream(SEED, n, t)
        counts = collections.Counter(sample_configuration(n, t, stream).counts for _ in range(100_000))
        k = multiset_coefficient(n, t)
        observed = [counts.get(c, 0) for c in oracles.configurations(n, t)]
        assert len(counts) == k
        chi[(n, t)] = stats.chisquare(observed).pvalue
    chi_ok = all(p > 1e-3 for p in chi.values())

    tail_ok = True
    for n in range(1, 5):
        for t in range(9):
            configs = list(oracles.configurations(n, t))
            for p in range(t + 1):
                tail_ok &= occupancy_tail_exact(n, t, p) == Fraction(sum(c[0] >= p for c in configs), len(configs))

    # cases with 0 < exact < 1, chosen from the exact curves alone
    panel = [
        (path(3), 2), (path(3), 3), (path(4), 3), (path(4), 4), (path(4), 5), (path(4), 6), (path(4), 7),
        (cycle(4), 3), (complete(3), 2), (star(3), 2), (star(3), 3), (star(3), 4), (cycle(5), 4), (cycle(6), 4),
        (cycle(6), 5), (cycle(6), 6), (cycle(6), 7), (cartesian_product(path(2), path(3)), 4),
        (cartesian_product(path(2), path(3)), 5), (complete(4), 3),
    ]
    inside = 0
    for i, (g, t) in enumerate(panel):
        exact = exact_solvability_probability(g, t)
        assert 0 < exact < 1, (g.label, t)
        est = estimate_solvability(g, t, 2000, SEED + i)
        inside += est.ci_low <= exact <= est.ci_high
    panel_ok = inside >= 19
    ok = chi_ok and tail_ok and panel_ok
    pv = ", ".join(f"{k}: {v:.3f}" for k, v in chi.items())
    record(7, ok, f"chi-square p-values {pv}; tail formula exact: {tail_ok}; Wilson coverage {inside}/20")
    assert ok


def _block_side(n):
    proper = [q for q in range(2, n) if n % q == 0]
    return proper[0] if proper else 1


def test_c8_grid_lemma_instances():
    start = time.perf_counter()
    misses, compared = [], 0
    trials = 10_000

    def check(label, freq, ref):
        nonlocal compared
        compared += 1
        q = float(ref)
        if abs(freq - q) > 3 * math.sqrt(q * (1 - q) / trials):
            misses.append(f"{label} freq {freq:.4f} ref {q:.4f}")

    union_ok = True
    for n in range(4, 17):
        m = _block_side(n)
        hole = run_hole_experiment(n, 1, m, n, trials, SEED)
        check(f"hole n={n}", hole.event_frequency, hole.exact_reference)
        check(f"block0 n={n}", hole.extra["block0_events"] / trials, prob_block_empty(n, m, n))
        assert hole.exact_reference == prob_some_block_empty(n, m, n // m, n)

        p = math.ceil(3 * math.log(n))
        flat = run_flat_experiment(n, 1, trials=trials, seed=SEED, t=2 * n, p=p)
        violation = 1 - flat.event_frequency
        check(f"flat n={n}", violation, prob_not_flat(n, 2 * n, p))
        sigma_u = math.sqrt(max(float(flat.extra["union_bound"]) * (1 - float(flat.extra["union_bound"])), 0) / trials)
        union_ok &= violation <= float(flat.extra["union_bound"]) + 3 * sigma_u
        union_ok &= flat.extra["union_bound"] == min(1, n * occupancy_tail_exact(n, 2 * n, p))

        full = run_full_experiment(n, 1, m, 2 * n, m, trials, SEED)
        check(f"full n={n}", full.event_frequency, prob_all_full(n, m, n // m, 2 * n, m))
    elapsed = time.perf_counter() - start
    ok = not misses and union_ok and elapsed < 300
    record(8, ok, f"{compared} frequency comparisons at 3 sigma, misses: {misses or 'none'}; "
                  f"union bound respected: {union_ok}; {elapsed:.1f}s")
    assert ok


@pytest.mark.parametrize("g, ts", [(path(4), range(1, 9)), (grid(3, 2), range(1, 17))], ids=["P4", "grid3x3"])
def test_c9_threshold_monotone_and_bracketed(g, ts):
    estimates = sweep(g, ts, 400, SEED)
    smoothed = monotone_smooth([float(e.p_hat) for e in estimates], [e.trials for e in estimates])
    nondecreasing = all(a <= b + 1e-12 for a, b in zip(smoothed, smoothed[1:]))
    raw = raw_violations(estimates)
    noise_ok = violations_within_noise(estimates)
    crossing = exact_crossing(g)
    bracket = find_threshold(g, 0.5, 400, SEED)
    contains = bracket.contains(crossing)
    ok = nondecreasing and noise_ok and contains
    record(9, ok, f"{g.label}: raw drops {raw} within CI {noise_ok}; exact crossing t={crossing}; "
                  f"bracket ({bracket.t_low}, {bracket.t_high}] contains it: {contains}")
    assert ok


@pytest.mark.parametrize("n, g", [(200, 4), (300, 5)])
def test_c10_construction_pipeline(n, g):
    worst, problems = 0.0, []
    for seed in range(5):
        start = time.perf_counter()
        final, report = construct_candidate(n, g, seed)
        worst = max(worst, time.perf_counter() - start)
        again, report2 = construct_candidate(n, g, seed)
        h = _nx(final)
        girth_ok = metrics(final).girth >= g and nx.girth(h) >= g
        diam_ok = metrics(final).diameter <= g - 1 and nx.is_connected(h) and nx.diameter(h) <= g - 1
        same = format_graph(final) == format_graph(again) and report.to_json() == report2.to_json()
        if not (girth_ok and diam_ok and same and report.certified):
            problems.append((seed, girth_ok, diam_ok, same))
    ok = not problems and worst < 120
    record(10, ok, f"(n={n}, g={g}) seeds 0-4: problems {problems or 'none'}; slowest run {worst:.2f}s")
    assert ok
