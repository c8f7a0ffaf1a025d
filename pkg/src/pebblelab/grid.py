"""Block partitions of grids and the counting lemmas behind the grid threshold.

Grid vertices use the flattened index of ``graph.grid``: the point
(x_1, ..., x_d) with 0 <= x_k < n is vertex ``sum_k x_k n^(d-k)``.

The Monte Carlo experiments here always carry an exact reference computed
by inclusion-exclusion or a polynomial convolution, so a desk-scale run is
checked against a closed form and not only against sampling noise.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from .graph import grid as grid_graph
from .pebbling import DEFAULT_BUDGET, PebblingSolver, Status
from .random_model import make_stream, multiset_coefficient, occupancy_tail_exact, sample_configuration

HOLE, FLAT, FULL, AMASS = 0, 1, 2, 3  # substream tags


@dataclass(frozen=True)
class BlockPartition:
    n: int
    d: int
    m: int
    blocks: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def block_size(self) -> int:
        return self.m**self.d

    def block_of(self) -> np.ndarray:
        """Array mapping each vertex to its block number."""
        out = np.empty(self.n**self.d, dtype=np.intp)
        for b, verts in enumerate(self.blocks):
            out[list(verts)] = b
        return out

    def centre(self, b: int) -> int:
        """Vertex of block b with every local coordinate m // 2."""
        corner = _coords(self.blocks[b][0], self.n, self.d)
        return _index([x + self.m // 2 for x in corner], self.n)


def _coords(v: int, n: int, d: int) -> list[int]:
    out = []
    for _ in range(d):
        v, x = divmod(v, n)
        out.append(x)
    return out[::-1]


def _index(xs: Sequence[int], n: int) -> int:
    v = 0
    for x in xs:
        v = v * n + x
    return v


def block_partition(n: int, d: int, m: int) -> BlockPartition:
    """Cut the n^d grid into (n/m)^d contiguous m-cubes, in lexicographic order."""
    if m < 1 or n < 1 or d < 1:
        raise ValueError("block partition needs n, d, m >= 1")
    if n % m:
        raise ValueError(f"block side {m} does not divide grid side {n}")
    blocks = []
    for corner in itertools.product(range(0, n, m), repeat=d):
        cells = itertools.product(*(range(c, c + m) for c in corner))
        blocks.append(tuple(sorted(_index(x, n) for x in cells)))
    return BlockPartition(n, d, m, tuple(blocks))


def nearest_even_divisor(x: float, n: int) -> int:
    """Even divisor of n closest to x (ties go up); at least 2."""
    options = [q for q in range(2, n + 1, 2) if n % q == 0]
    if not options:
        raise ValueError(f"grid side {n} has no even divisor")
    return min(options, key=lambda q: (abs(q - x), -q))


@dataclass(frozen=True)
class GridParams:
    """Resolved real-valued parameters of a grid experiment, rounded to integers.

    ``suite`` is "lower" (hole/flat) or "upper"; ``preset`` names the formula
    used for the upper suite's block side ("lemma" or "theorem").
    """

    suite: str
    n: int
    d: int
    N: int
    c: float
    eps: float
    delta: float
    u: float
    s: float
    t: int
    m: int
    M: int
    k: int
    p: int = 0
    threshold: int = 0
    preset: str = ""
    m_real: float = field(default=0.0)

    @classmethod
    def lower(cls, n: int, d: int, c: float, eps: float, delta: float) -> "GridParams":
        """u = c lg(N)^(1/(d+1)), s = 2^u, t = sN, m = (2+delta)u, p = (1+eps)s ln N.

        t and p are rounded up; m goes to the nearest even divisor of n.
        """
        _check_positive(c=c, eps=eps, delta=delta)
        N = n**d
        u = c * math.log2(N) ** (1 / (d + 1))
        s = 2**u
        m_real = (2 + delta) * u
        m = nearest_even_divisor(m_real, n)
        return cls(
            "lower", n, d, N, c, eps, delta, u, s,
            t=math.ceil(s * N), m=m, M=m**d, k=N // m**d,
            p=math.ceil((1 + eps) * s * math.log(N)), m_real=m_real,
        )

    @classmethod
    def upper(cls, n: int, d: int, eps: float, preset: str = "lemma") -> "GridParams":
        """c' = d+1+eps, u' = c' lg(N)^(1/(d+1)), s' = 2^u', t' = s'N.

        preset "lemma": m' = ((eps+1)/c')^(1/d) lg(N)^(1/(d+1)), threshold M' 2^(d m').
        preset "theorem": u' gains +2, m' = ((d+1)/c')^(1/d) lg(N)^(1/(d+1)), threshold 2^M'.
        t' is rounded down and the threshold up, since both make filling harder.
        """
        _check_positive(eps=eps)
        if preset not in ("lemma", "theorem"):
            raise ValueError("preset must be 'lemma' or 'theorem'")
        N = n**d
        cp = d + 1 + eps
        root = math.log2(N) ** (1 / (d + 1))
        u = cp * root + (2 if preset == "theorem" else 0)
        s = 2**u
        ratio = (eps + 1) / cp if preset == "lemma" else (d + 1) / cp
        m_real = ratio ** (1 / d) * root
        m = nearest_even_divisor(m_real, n)
        M = m**d
        threshold = M * 2 ** (d * m) if preset == "lemma" else 2**M
        return cls(
            "upper", n, d, N, cp, eps, 0.0, u, s,
            t=math.floor(s * N), m=m, M=M, k=N // M, threshold=threshold, preset=preset, m_real=m_real,
        )

    def to_dict(self) -> dict:
        return asdict(self)


def _check_positive(**values: float) -> None:
    for name, v in values.items():
        if not v > 0:
            raise ValueError(f"{name} must be positive")


# counting lemmas


def r_i_bound(d: int, m: int, i: int) -> int:
    """sum_{j=1}^d C(d,j) 2^j m^(d-j) <j i>."""
    if d < 1 or m < 1 or i < 1:
        raise ValueError("need d, m, i >= 1")
    return sum(math.comb(d, j) * 2**j * m ** (d - j) * multiset_coefficient(j, i) for j in range(1, d + 1))


MAX_WINDOW_POINTS = 2_000_000


def r_i_counts(d: int, m: int, i_max: int) -> list[int]:
    """[R_1, ..., R_imax] by enumerating lattice points around the box.

    The box holds points with every |x_k| <= m/2 and its boundary those with
    some |x_k| = m/2.  Coordinates are doubled (X = 2x, X = m mod 2) so odd m
    gives a half-integer lattice with m+1 points per axis, like even m.
    Distances to the boundary are minimised over the boundary explicitly.
    """
    if d < 1 or m < 1 or i_max < 1:
        raise ValueError("need d, m, i_max >= 1")
    axis = np.arange(-m - 2 * i_max, m + 2 * i_max + 1, 2)
    if len(axis) ** d > MAX_WINDOW_POINTS:
        raise ValueError("enumeration window too large; lower d, m or i_max")
    pts = np.array(list(itertools.product(axis, repeat=d)), dtype=np.int64)
    inside = np.all(np.abs(pts) <= m, axis=1)
    boundary = pts[inside & np.any(np.abs(pts) == m, axis=1)]
    outside = pts[~inside]
    best = np.full(len(outside), np.iinfo(np.int64).max)
    for start in range(0, len(boundary), 256):
        chunk = boundary[start:start + 256]
        dist = np.abs(outside[:, None, :] - chunk[None, :, :]).sum(axis=2).min(axis=1)
        np.minimum(best, dist, out=best)
    # doubled coordinates: original distance i is doubled distance 2i
    return [int(np.count_nonzero(best == 2 * i)) for i in range(1, i_max + 1)]


def r_i_exact(d: int, m: int, i: int) -> int:
    if i < 1:
        raise ValueError("need i >= 1")
    return r_i_counts(d, m, i)[i - 1]


@dataclass(frozen=True)
class BoundaryCount:
    d: int
    m: int
    i: int
    exact: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.exact <= self.bound


def boundary_counts(d: int, m: int, i_max: int) -> list[BoundaryCount]:
    exact = r_i_counts(d, m, i_max)
    return [BoundaryCount(d, m, i, exact[i - 1], r_i_bound(d, m, i)) for i in range(1, i_max + 1)]


def sum_lemma(j: int, n_terms: int) -> tuple[Fraction, int]:
    """(sum_{i=0}^{n_terms} <j i> 2^-i, 2^j) as exact values."""
    if j < 1 or n_terms < 0:
        raise ValueError("need j >= 1 and n_terms >= 0")
    partial = sum((Fraction(multiset_coefficient(j, i), 2**i) for i in range(n_terms + 1)), Fraction(0))
    return partial, 2**j


def amass_bound(p: int, m: int, d: int) -> int:
    """p (m+4)^d: the cap on pebbles that can be moved onto an empty block's boundary."""
    if p < 0 or m < 0 or d < 0:
        raise ValueError("amass bound needs nonnegative inputs")
    return p * (m + 4) ** d


def amass_chain(p: int, m: int, d: int) -> int:
    """p sum_{j=0}^d C(d,j) 4^j m^(d-j), the binomial expansion of amass_bound."""
    return p * sum(math.comb(d, j) * 4**j * m ** (d - j) for j in range(d + 1))


# exact references


def prob_some_block_empty(N: int, M: int, k: int, t: int) -> Fraction:
    """Pr[at least one of k disjoint M-vertex blocks is empty], N vertices, t pebbles."""
    total = multiset_coefficient(N, t)
    acc = 0
    for s in range(1, k + 1):
        rest = N - s * M
        if rest == 0:
            term = 1 if t == 0 else 0
        else:
            term = multiset_coefficient(rest, t)
        acc += (-1) ** (s + 1) * math.comb(k, s) * term
    return Fraction(acc, total)


def prob_block_empty(N: int, M: int, t: int) -> Fraction:
    """Pr[a fixed M-vertex block is empty] = <N-M, t> / <N, t>."""
    if N == M:
        return Fraction(int(t == 0))
    return Fraction(multiset_coefficient(N - M, t), multiset_coefficient(N, t))


def prob_not_flat(N: int, t: int, p: int) -> Fraction:
    """Pr[some vertex holds >= p pebbles], by inclusion-exclusion over vertices."""
    if p <= 0:
        return Fraction(1)
    total = multiset_coefficient(N, t)
    acc = 0
    for s in range(1, min(N, t // p) + 1):
        acc += (-1) ** (s + 1) * math.comb(N, s) * multiset_coefficient(N, t - s * p)
    return Fraction(acc, total)


def prob_all_full(N: int, M: int, k: int, t: int, threshold: int) -> Fraction:
    """Pr[each of the k blocks holds >= threshold pebbles] when the blocks cover all N vertices.

    Counts configurations by convolving the per-block load polynomials
    sum_{L >= threshold} <M, L> x^L and reading off the coefficient of x^t.
    """
    if k * M != N:
        raise ValueError("blocks must cover the grid")
    if threshold * k > t:
        return Fraction(0)
    base = [multiset_coefficient(M, L) if L >= threshold else 0 for L in range(t + 1)]
    poly = [1] + [0] * t
    for _ in range(k):
        nxt = [0] * (t + 1)
        for a, x in enumerate(poly):
            if x:
                for b in range(threshold, t + 1 - a):
                    nxt[a + b] += x * base[b]
        poly = nxt
    return Fraction(poly[t], multiset_coefficient(N, t))


# experiments


@dataclass(frozen=True)
class ExperimentReport:
    experiment: str
    n: int
    d: int
    m: int
    t: int
    trials: int
    events: int
    exact_reference: Fraction
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def event_frequency(self) -> float:
        return self.events / self.trials

    def sigma(self) -> float:
        """Binomial standard deviation of the frequency under the exact reference."""
        q = float(self.exact_reference)
        return math.sqrt(q * (1 - q) / self.trials)

    def within(self, k_sigma: float = 3.0) -> bool:
        return abs(self.event_frequency - float(self.exact_reference)) <= k_sigma * self.sigma()

    def csv_row(self) -> list:
        return [
            self.experiment, self.n, self.d, self.m, self.t, self.trials,
            f"{self.event_frequency:.6f}", f"{float(self.exact_reference):.6f}", self.seed,
        ]


REPORT_COLUMNS = ["experiment", "n", "d", "m", "t", "trials", "event_frequency", "exact_reference", "seed"]


def write_reports_csv(reports: Iterable[ExperimentReport], fh: IO[str], header: bool = True) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if header:
        writer.writerow(REPORT_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row())


def _samples(N: int, t: int, trials: int, seed: int, tag: int):
    for i in range(trials):
        yield np.asarray(sample_configuration(N, t, make_stream(seed, tag, t, i)).counts, dtype=np.int64)


def run_hole_experiment(n: int, d: int, m: int, t: int, trials: int, seed: int) -> ExperimentReport:
    """Frequency of "some block is empty" against its inclusion-exclusion value.

    ``extra`` also carries the fixed-block frequency (block 0) and its exact
    value <N-M, t>/<N, t>.
    """
    part = block_partition(n, d, m)
    N, M, k = n**d, part.block_size, part.k
    block_of = part.block_of()
    some = first = 0
    for counts in _samples(N, t, trials, seed, HOLE):
        loads = np.bincount(block_of, weights=counts, minlength=k)
        empty = loads == 0
        some += bool(empty.any())
        first += bool(empty[0])
    return ExperimentReport(
        "hole", n, d, m, t, trials, some, prob_some_block_empty(N, M, k, t), seed,
        extra={"block0_events": first, "block0_exact": prob_block_empty(N, M, t)},
    )


def run_flat_experiment(
    n: int, d: int, s: float | None = None, eps: float | None = None, trials: int = 1000, seed: int = 0,
    t: int | None = None, p: int | None = None,
) -> ExperimentReport:
    """Frequency of "every vertex holds < p pebbles".

    Either give (s, eps), so that t = ceil(sN) and p = ceil((1+eps) s ln N),
    or give t and p directly.  ``extra`` carries the union bound
    N <N, t-p>/<N, t> on the violation probability and the exponential bound
    N e^(-p/(s+1)).
    """
    N = n**d
    if t is None or p is None:
        if s is None or eps is None:
            raise ValueError("give either (s, eps) or (t, p)")
        t = math.ceil(s * N) if t is None else t
        p = math.ceil((1 + eps) * s * math.log(N)) if p is None else p
    s_eff = t / N if s is None else s
    flat = 0
    for counts in _samples(N, t, trials, seed, FLAT):
        flat += int(counts.max(initial=0)) < p
    violation = prob_not_flat(N, t, p)
    return ExperimentReport(
        "flat", n, d, 1, t, trials, flat, 1 - violation, seed,
        extra={
            "p": p,
            "violation_exact": violation,
            "union_bound": min(Fraction(1), N * occupancy_tail_exact(N, t, p)),
            "exp_bound": N * math.exp(-p / (s_eff + 1)),
        },
    )


def run_full_experiment(n: int, d: int, m: int, t: int, threshold: int, trials: int, seed: int) -> ExperimentReport:
    """Frequency of "every block holds >= threshold pebbles"; ``extra`` has min-load tallies."""
    part = block_partition(n, d, m)
    N, M, k = n**d, part.block_size, part.k
    block_of = part.block_of()
    full = 0
    min_loads: dict[int, int] = {}
    for counts in _samples(N, t, trials, seed, FULL):
        loads = np.bincount(block_of, weights=counts, minlength=k)
        low = int(loads.min())
        min_loads[low] = min_loads.get(low, 0) + 1
        full += low >= threshold
    return ExperimentReport(
        "full", n, d, m, t, trials, full, prob_all_full(N, M, k, t, threshold), seed,
        extra={"threshold": threshold, "min_load_counts": dict(sorted(min_loads.items()))},
    )


def run_from_params(params: GridParams, trials: int, seed: int) -> list[ExperimentReport]:
    if params.suite == "lower":
        return [
            run_hole_experiment(params.n, params.d, params.m, params.t, trials, seed),
            run_flat_experiment(params.n, params.d, trials=trials, seed=seed, t=params.t, p=params.p),
        ]
    return [run_full_experiment(params.n, params.d, params.m, params.t, params.threshold, trials, seed)]


@dataclass(frozen=True)
class HoleArgumentReport:
    trials: int
    qualifying: int
    confirmed: int
    amass: int
    reach: int

    @property
    def holds(self) -> bool:
        return self.confirmed == self.qualifying


def hole_argument_check(
    n: int, d: int, m: int, p: int, t: int, trials: int, seed: int, budget: int = DEFAULT_BUDGET
) -> HoleArgumentReport:
    """Sample configurations and, whenever some block is empty, every load is
    below p and p(m+4)^d < 2^(m/2), ask the exact solver whether the empty
    block's centre is reachable.  ``confirmed`` counts the unsolvable ones.
    """
    amass, reach = amass_bound(p, m, d), 2 ** (m / 2)
    if not amass < reach:
        raise ValueError(f"p(m+4)^d = {amass} is not below 2^(m/2) = {reach:g}")
    part = block_partition(n, d, m)
    block_of = part.block_of()
    solver = PebblingSolver(grid_graph(n, d))
    qualifying = confirmed = 0
    for counts in _samples(n**d, t, trials, seed, AMASS):
        if counts.max(initial=0) >= p:
            continue
        loads = np.bincount(block_of, weights=counts, minlength=part.k)
        empty = np.flatnonzero(loads == 0)
        if not len(empty):
            continue
        qualifying += 1
        verdict = solver.r_solvable(counts.tolist(), part.centre(int(empty[0])), budget)
        confirmed += verdict.status is Status.UNSOLVABLE
    return HoleArgumentReport(trials, qualifying, confirmed, amass, int(reach))
