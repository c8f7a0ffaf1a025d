"""Uniformly random pebbling configurations and solvability probabilities.

The model is uniform over multisets: each of the ``<n t>`` configurations of
t unlabeled pebbles on n vertices is equally likely.  This is not the same
distribution as dropping t pebbles independently on random vertices.

Randomness is drawn from ``numpy.random.SeedSequence(seed, spawn_key=...)``
substreams keyed by (t, trial index), so an estimate is a pure function of
its arguments and does not depend on how trials are scheduled.
"""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .graph import Graph
from .pebbling import DEFAULT_BUDGET, Configuration, PebblingSolver, Status, pi_bounds

Z95 = 1.959963984540054
ENUMERATION_LIMIT = 2_000_000


class EstimationError(RuntimeError):
    pass


def multiset_coefficient(a: int, b: int) -> int:
    """<a b> = C(a+b-1, b), the number of b-pebble configurations on a vertices."""
    if a < 0 or b < 0:
        raise ValueError("multiset coefficient needs a, b >= 0")
    if a == 0:
        if b > 0:
            raise ValueError("no configurations of pebbles on zero vertices")
        return 1
    return math.comb(a + b - 1, b)


def falling_factorial(a: int, b: int) -> int:
    """a (a-1) ... (a-b+1)."""
    if b < 0:
        raise ValueError("falling factorial needs b >= 0")
    return math.prod(range(a, a - b, -1))


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key); keys must be nonnegative ints."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy % (1 << 64))


def sample_configuration(n: int, t: int, stream: np.random.Generator) -> Configuration:
    """Exactly uniform t-pebble configuration on n vertices (stars and bars).

    Chooses n-1 bar positions among n+t-1 slots by a partial Fisher-Yates
    shuffle kept in a dict, so memory is O(n) however large t is.
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    if t < 0:
        raise ValueError("pebble count must be nonnegative")
    k = n - 1
    if k == 0:
        return Configuration((t,))
    slots = n + t - 1
    picks = stream.integers(np.arange(k), slots)
    swapped: dict[int, int] = {}
    bars = []
    for i, j in enumerate(picks.tolist()):
        bars.append(swapped.get(j, j))
        swapped[j] = swapped.get(i, i)
    bars.sort()
    counts = [bars[0]]
    counts.extend(b - a - 1 for a, b in zip(bars, bars[1:]))
    counts.append(slots - 1 - bars[-1])
    return Configuration(tuple(counts))


def iter_configurations(n: int, t: int) -> Iterator[tuple[int, ...]]:
    """Every t-pebble configuration on n vertices, once each."""
    if n == 1:
        yield (t,)
        return
    slots = n + t - 1
    for bars in itertools.combinations(range(slots), n - 1):
        counts = [bars[0]]
        counts.extend(b - a - 1 for a, b in zip(bars, bars[1:]))
        counts.append(slots - 1 - bars[-1])
        yield tuple(counts)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    # clamp so float rounding never puts p_hat outside its own interval
    return min(max(0.0, centre - half), p), max(min(1.0, centre + half), p)


@dataclass(frozen=True)
class TrialEstimate:
    t: int
    trials: int
    successes: int
    seed: int
    graph_id: str = ""
    n: int = 0
    ci_low: float = field(default=0.0)
    ci_high: float = field(default=1.0)

    @classmethod
    def from_counts(cls, t, trials, successes, seed, graph_id="", n=0, z: float = Z95):
        if not 0 <= successes <= trials:
            raise ValueError("successes must lie in [0, trials]")
        low, high = wilson_interval(successes, trials, z)
        return cls(t, trials, successes, seed, graph_id, n, low, high)

    @property
    def p_hat(self) -> Fraction:
        return Fraction(self.successes, self.trials)

    def csv_row(self) -> list:
        return [
            self.graph_id, self.n, self.t, self.trials, self.successes,
            f"{float(self.p_hat):.6f}", f"{self.ci_low:.6f}", f"{self.ci_high:.6f}", self.seed,
        ]


ESTIMATE_COLUMNS = ["graph_id", "n", "t", "trials", "successes", "p_hat", "ci_low", "ci_high", "seed"]


def write_estimates_csv(estimates: Iterable[TrialEstimate], fh: IO[str], header: bool = True) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if header:
        writer.writerow(ESTIMATE_COLUMNS)
    for e in estimates:
        writer.writerow(e.csv_row())


def _count_successes(g: Graph, t: int, seed: int, indices: Sequence[int], budget: int, solver=None) -> int:
    solver = solver or PebblingSolver(g)
    wins = 0
    for i in indices:
        c = sample_configuration(g.n, t, make_stream(seed, t, i))
        verdict = solver.solvable(c, budget)
        if verdict.status is Status.UNKNOWN:
            raise EstimationError(f"trial {i}: solver budget exhausted on configuration {c}")
        wins += verdict.status is Status.SOLVABLE
    return wins


def _chunk_worker(args):
    return _count_successes(*args)


def estimate_solvability(
    g: Graph,
    t: int,
    trials: int,
    seed: int,
    budget: int = DEFAULT_BUDGET,
    solver: PebblingSolver | None = None,
    jobs: int = 1,
    z: float = Z95,
) -> TrialEstimate:
    """Monte Carlo estimate of Pr[a uniform t-pebble configuration is solvable]."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if not g.is_connected:
        raise ValueError("solvability needs a connected graph")
    if jobs > 1 and trials > 1:
        chunks = [range(k, trials, jobs) for k in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            wins = sum(pool.map(_chunk_worker, [(g, t, seed, c, budget) for c in chunks]))
    else:
        wins = _count_successes(g, t, seed, range(trials), budget, solver)
    return TrialEstimate.from_counts(t, trials, wins, seed, g.label, g.n, z)


def exact_solvability_probability(
    g: Graph, t: int, budget: int = DEFAULT_BUDGET, limit: int = ENUMERATION_LIMIT, solver: PebblingSolver | None = None
) -> Fraction:
    """Pr[C_t solvable] by enumerating all <n t> configurations."""
    total = multiset_coefficient(g.n, t)
    if total > limit:
        raise EstimationError(f"<{g.n} {t}> = {total} configurations exceeds the enumeration limit {limit}")
    solver = solver or PebblingSolver(g)
    wins = 0
    for c in iter_configurations(g.n, t):
        verdict = solver.solvable(c, budget)
        if verdict.status is Status.UNKNOWN:
            raise EstimationError(f"solver budget exhausted on configuration {c}")
        wins += verdict.status is Status.SOLVABLE
    return Fraction(wins, total)


def occupancy_tail_exact(n: int, t: int, p: int) -> Fraction:
    """Pr[a fixed vertex holds >= p pebbles] = <n, t-p> / <n, t>."""
    if p > t:
        return Fraction(0)
    if p <= 0:
        return Fraction(1)
    return Fraction(multiset_coefficient(n, t - p), multiset_coefficient(n, t))


def monotone_smooth(values: Sequence[float], weights: Sequence[float] | None = None) -> list[float]:
    """Nondecreasing least-squares fit by pool-adjacent-violators."""
    if weights is None:
        weights = [1.0] * len(values)
    blocks: list[list[float]] = []  # [mean, weight, size]
    for v, w in zip(values, weights):
        blocks.append([float(v), float(w), 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2, s2 = blocks.pop()
            m1, w1, s1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, s1 + s2])
    out: list[float] = []
    for mean, _, size in blocks:
        out.extend([mean] * size)
    return out


def raw_violations(estimates: Sequence[TrialEstimate]) -> list[tuple[int, int]]:
    """Consecutive (t, t') pairs where p_hat drops, in t order."""
    ordered = sorted(estimates, key=lambda e: e.t)
    return [(a.t, b.t) for a, b in zip(ordered, ordered[1:]) if b.p_hat < a.p_hat]


def violations_within_noise(estimates: Sequence[TrialEstimate]) -> bool:
    """Every decrease in p_hat is between estimates whose intervals overlap."""
    by_t = {e.t: e for e in estimates}
    return all(by_t[b].ci_high >= by_t[a].ci_low for a, b in raw_violations(estimates))


def sweep(g: Graph, ts: Iterable[int], trials: int, seed: int, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> list[TrialEstimate]:
    solver = PebblingSolver(g)
    return [estimate_solvability(g, t, trials, seed, budget, solver, jobs) for t in ts]


@dataclass(frozen=True)
class ThresholdBracket:
    t_low: int
    t_high: int
    target: float
    estimates: tuple[TrialEstimate, ...]
    smoothed: tuple[float, ...] = ()

    def contains(self, t: int) -> bool:
        """True when t_low < t <= t_high."""
        return self.t_low < t <= self.t_high


def find_threshold(
    g: Graph,
    target: float = 0.5,
    trials: int = 400,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    z: float = Z95,
) -> ThresholdBracket:
    """Bracket (t_low, t_high) around the t where Pr[solvable] crosses target.

    t_low's interval lies below target (or t_low = 1) and t_high's lies
    above it (or t_high = n 2^diam, where every configuration is solvable).
    A probe whose interval straddles the target splits the search into a
    lower and an upper bisection, so the bracket can be wider than 1.
    """
    if not 0 < target < 1:
        raise ValueError("target must lie strictly between 0 and 1")
    if g.n < 2:
        raise ValueError("threshold search needs at least two vertices")
    solver = PebblingSolver(g)
    _, hi = pi_bounds(g)
    probes: dict[int, TrialEstimate] = {}

    def probe(t: int) -> TrialEstimate:
        if t not in probes:
            probes[t] = estimate_solvability(g, t, trials, seed, budget, solver, jobs, z)
        return probes[t]

    below = lambda t: probe(t).ci_high < target  # noqa: E731
    above = lambda t: probe(t).ci_low > target  # noqa: E731

    lo = 1
    probe(lo)
    probe(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            lo = mid
        elif above(mid):
            hi = mid
        else:
            a, b = lo, mid
            while b - a > 1:
                m = (a + b) // 2
                a, b = (m, b) if below(m) else (a, m)
            c, d = mid, hi
            while d - c > 1:
                m = (c + d) // 2
                c, d = (c, m) if above(m) else (m, d)
            lo, hi = a, d
            break
    ordered = tuple(sorted(probes.values(), key=lambda e: e.t))
    smoothed = monotone_smooth([float(e.p_hat) for e in ordered], [e.trials for e in ordered])
    if not probe(lo).p_hat <= target <= probe(hi).p_hat:
        raise EstimationError("estimated probability does not cross the target inside the bounds")
    return ThresholdBracket(lo, hi, target, ordered, tuple(smoothed))


def exact_crossing(g: Graph, target: float = 0.5, budget: int = DEFAULT_BUDGET, limit: int = ENUMERATION_LIMIT) -> int:
    """Smallest t with exact Pr[C_t solvable] >= target, by enumeration."""
    solver = PebblingSolver(g)
    t = 1
    _, hi = pi_bounds(g)
    while t <= hi:
        if exact_solvability_probability(g, t, budget, limit, solver) >= target:
            return t
        t += 1
    raise EstimationError("no crossing below the guaranteed-solvable count")
