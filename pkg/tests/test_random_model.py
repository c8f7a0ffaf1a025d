import collections
import io
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import stats

import oracles
from pebblelab.graph import complete, path
from pebblelab.random_model import (
    EstimationError,
    TrialEstimate,
    estimate_solvability,
    exact_crossing,
    exact_solvability_probability,
    falling_factorial,
    find_threshold,
    iter_configurations,
    make_stream,
    monotone_smooth,
    multiset_coefficient,
    occupancy_tail_exact,
    raw_violations,
    sample_configuration,
    sweep,
    violations_within_noise,
    wilson_interval,
    write_estimates_csv,
)


def test_multiset_examples():
    assert multiset_coefficient(2, 3) == 4
    assert multiset_coefficient(7, 0) == 1
    assert multiset_coefficient(3, 3) == 10 == len(list(oracles.configurations(3, 3)))
    with pytest.raises(ValueError):
        multiset_coefficient(0, 2)


@given(st.integers(1, 6), st.integers(0, 7))
def test_multiset_counts_configurations(n, t):
    listed = list(iter_configurations(n, t))
    assert len(listed) == len(set(listed)) == multiset_coefficient(n, t)
    assert set(listed) == set(oracles.configurations(n, t))


def test_falling_factorial():
    assert falling_factorial(5, 2) == 20 and falling_factorial(3, 4) == 0 and falling_factorial(4, 0) == 1


def test_sampler_single_vertex():
    assert sample_configuration(1, 9, make_stream(1)).counts == (9,)


@given(st.integers(1, 8), st.integers(0, 30), st.integers(0, 2**32))
def test_sampler_total_and_length(n, t, seed):
    c = sample_configuration(n, t, make_stream(seed))
    assert len(c) == n and c.total == t


@pytest.mark.parametrize("n, t, samples", [(2, 2, 30000), (3, 2, 60000)])
def test_sampler_uniform_small(n, t, samples):
    stream = make_stream(99, n, t)
    counts = collections.Counter(sample_configuration(n, t, stream).counts for _ in range(samples))
    k = multiset_coefficient(n, t)
    assert len(counts) == k
    sigma = math.sqrt(samples * (1 / k) * (1 - 1 / k))
    for c in iter_configurations(n, t):
        assert abs(counts[c] - samples / k) <= 3 * sigma
    assert stats.chisquare(list(counts.values())).pvalue > 1e-3


def test_streams_are_keyed():
    a = make_stream(5, 1, 2).integers(0, 2**62, 4).tolist()
    assert a == make_stream(5, 1, 2).integers(0, 2**62, 4).tolist()
    assert a != make_stream(5, 2, 1).integers(0, 2**62, 4).tolist()


def test_exact_probability_examples():
    assert exact_solvability_probability(complete(2), 2) == 1
    assert exact_solvability_probability(complete(2), 1) == 0
    assert exact_solvability_probability(path(3), 2) == Fraction(1, 6)
    p = exact_solvability_probability(path(3), 4)
    assert 0 < p <= 1
    assert p == oracles.solvability_probability(path(3), 4)


@pytest.mark.parametrize("t", [1, 2, 3, 4, 5])
def test_exact_probability_matches_oracle_p4(t):
    assert exact_solvability_probability(path(4), t) == oracles.solvability_probability(path(4), t)


def test_exact_probability_limit():
    with pytest.raises(EstimationError):
        exact_solvability_probability(path(6), 30, limit=100)


def test_estimate_examples():
    assert estimate_solvability(complete(2), 1, 200, 1).p_hat == 0
    assert estimate_solvability(complete(2), 2, 200, 1).p_hat == 1
    e = estimate_solvability(path(3), 2, 3000, 11)
    assert e.ci_low <= 1 / 6 <= e.ci_high


def test_estimate_deterministic_and_schedule_independent():
    a = estimate_solvability(path(4), 4, 300, 42)
    b = estimate_solvability(path(4), 4, 300, 42)
    c = estimate_solvability(path(4), 4, 300, 42, jobs=2)
    assert a == b == c
    assert estimate_solvability(path(4), 4, 300, 43) != a


def test_estimate_budget_error_names_trial():
    from pebblelab.graph import grid

    with pytest.raises(EstimationError, match="trial"):
        estimate_solvability(grid(3, 2), 12, 20, 1, budget=1)


@given(st.integers(0, 50), st.integers(1, 50))
def test_wilson_contains_p_hat(k, extra):
    n = k + extra
    low, high = wilson_interval(k, n)
    assert 0 <= low <= k / n <= high <= 1
    e = TrialEstimate.from_counts(3, n, k, 0)
    assert e.ci_low <= e.p_hat <= e.ci_high


def test_trial_estimate_rejects_bad_counts():
    with pytest.raises(ValueError):
        TrialEstimate.from_counts(1, 3, 4, 0)


def test_csv_schema():
    buf = io.StringIO()
    write_estimates_csv([estimate_solvability(path(3), 4, 10, 1)], buf)
    header, row = buf.getvalue().splitlines()
    assert header == "graph_id,n,t,trials,successes,p_hat,ci_low,ci_high,seed"
    assert row.startswith("P3,3,4,10,")


@given(st.lists(st.floats(0, 1), max_size=30))
def test_monotone_smooth_properties(values):
    out = monotone_smooth(values)
    assert len(out) == len(values)
    assert all(a <= b + 1e-12 for a, b in zip(out, out[1:]))
    if values:
        assert math.isclose(sum(out), sum(values), abs_tol=1e-9)
        if all(a <= b for a, b in zip(values, values[1:])):
            assert out == pytest.approx(values)


def test_monotone_smooth_pools():
    assert monotone_smooth([0.1, 0.5, 0.3, 0.9]) == pytest.approx([0.1, 0.4, 0.4, 0.9])


def test_occupancy_examples():
    assert occupancy_tail_exact(5, 3, 0) == 1
    assert occupancy_tail_exact(2, 2, 2) == Fraction(1, 3)
    assert occupancy_tail_exact(3, 4, 2) == Fraction(2, 5)
    assert occupancy_tail_exact(3, 2, 5) == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_occupancy_matches_enumeration(n):
    for t in range(9):
        configs = list(oracles.configurations(n, t))
        for p in range(t + 1):
            count = sum(c[0] >= p for c in configs)
            assert occupancy_tail_exact(n, t, p) == Fraction(count, len(configs))


@settings(max_examples=200)
@given(st.integers(1, 40), st.integers(0, 60), st.integers(0, 20))
def test_occupancy_below_falling_factorial_bound(n, t, p):
    # product of (t-i)/(n+t-1-i), each factor at most t/(n+t-1)
    assume(n + t > 1)
    assert occupancy_tail_exact(n, t, p) <= Fraction(t, n + t - 1) ** p


def test_occupancy_can_exceed_t_over_n_plus_t():
    # the looser form t/(n+t) fails for p=1 at every n, t
    assert occupancy_tail_exact(1, 1, 1) == 1 > Fraction(1, 2)
    assert occupancy_tail_exact(5, 3, 1) == Fraction(3, 7) > Fraction(3, 8)


@pytest.mark.parametrize("s", [0.5, 1, 2, 3])
@pytest.mark.parametrize("eps", [0.5, 1])
def test_occupancy_flat_bound_in_lemma_regime(s, eps):
    for n in range(16, 400, 7):
        t = math.ceil(s * n)
        p = math.ceil((1 + eps) * s * math.log(n))
        assert occupancy_tail_exact(n, t, p) <= Fraction(t, n + t) ** p


def test_find_threshold_k2():
    b = find_threshold(complete(2), seed=3)
    assert (b.t_low, b.t_high) == (1, 2)


def test_find_threshold_p4_brackets_exact_crossing():
    b = find_threshold(path(4), trials=400, seed=8)
    assert b.contains(exact_crossing(path(4)))
    assert list(b.smoothed) == sorted(b.smoothed)


def test_find_threshold_rejects_bad_target():
    with pytest.raises(ValueError):
        find_threshold(path(3), target=1.0)


def test_sweep_monotone_within_noise():
    ests = sweep(path(4), range(1, 10), 300, 5)
    assert violations_within_noise(ests)
    assert all(e.trials == 300 for e in ests)
    assert raw_violations(ests) == [] or violations_within_noise(ests)
