"""Exact pebbling: moves, r-solvability, pebbling numbers and Class 0.

A pebbling move takes two pebbles off a vertex and puts one on a
neighbour.  Every move lowers the total, so the configurations reachable
from a start state form a finite DAG and a memoised depth-first search
decides r-solvability exactly.

The r-solvability search prunes a state when no neighbour a of r can still
collect two pebbles: pebbles never pass through r before it is reached, so
``sum_v C(v) 2^-dist_{G-r}(v, a) >= 2`` must hold for some a.  This is a
strictly sharper test than the plain weight ``sum_v C(v) 2^-dist(v, r) >= 1``,
which is kept as the human-readable certificate.

Pebbling numbers are found per root by branch and bound over r-unsolvable
configurations.  Unsolvable configurations are closed under removing
pebbles, so the largest count a vertex can carry on top of a partial
assignment bounds every completion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import Graph, cartesian_product, diameter

DEFAULT_BUDGET = 50_000_000
# about 80 bytes per remembered state
DEFAULT_MEMO_LIMIT = 12_000_000


class IllegalMoveError(ValueError):
    pass


class BudgetExceeded(Exception):
    """Internal signal: the explored-configuration budget ran out."""


@dataclass(frozen=True)
class Configuration:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(x) for x in self.counts)
        if any(x < 0 for x in counts):
            raise ValueError("pebble counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def n(self) -> int:
        return len(self.counts)

    def __getitem__(self, v: int) -> int:
        return self.counts[v]

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __le__(self, other: "Configuration") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        return cls(tuple(int(x) for x in text.split()))

    def __str__(self) -> str:
        return " ".join(map(str, self.counts))

    @classmethod
    def single(cls, n: int, v: int, count: int) -> "Configuration":
        counts = [0] * n
        counts[v] = count
        return cls(tuple(counts))


def _as_config(c) -> Configuration:
    return c if isinstance(c, Configuration) else Configuration(tuple(c))


class Status(enum.Enum):
    SOLVABLE = "solvable"
    UNSOLVABLE = "unsolvable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolveVerdict:
    status: Status
    witness: tuple[tuple[int, int], ...] | None = None
    certificate: str | None = None
    nodes_explored: int = 0
    weight: Fraction | None = None
    root: int | None = None

    @property
    def solvable(self) -> bool:
        return self.status is Status.SOLVABLE

    @property
    def unsolvable(self) -> bool:
        return self.status is Status.UNSOLVABLE


@dataclass(frozen=True)
class PebblingResult:
    """Pebbling number, or a bracket when the budget ran out.

    ``witness_config`` holds ``lower - 1`` pebbles and is unsolvable for
    ``witness_root``; when the result is exact this is a π−1 witness.
    """

    lower: int
    upper: int
    witness_config: Configuration
    witness_root: int
    roots_checked: int
    nodes_explored: int

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def pi(self) -> int | None:
        return self.lower if self.exact else None

    def __str__(self) -> str:
        return str(self.pi) if self.exact else f"[{self.lower}, {self.upper}]"


def apply_move(g: Graph, c, src: int, dst: int) -> Configuration:
    c = _as_config(c)
    if not g.has_edge(src, dst):
        raise IllegalMoveError(f"{src} and {dst} are not adjacent")
    if c.counts[src] < 2:
        raise IllegalMoveError(f"vertex {src} holds {c.counts[src]} pebble(s), needs 2")
    counts = list(c.counts)
    counts[src] -= 2
    counts[dst] += 1
    return Configuration(tuple(counts))


def replay(g: Graph, c, moves: Iterable[tuple[int, int]]) -> Configuration:
    c = _as_config(c)
    for src, dst in moves:
        c = apply_move(g, c, src, dst)
    return c


def weight_bound(g: Graph, c, r: int) -> Fraction:
    """sum_v C(v) / 2^dist(v, r); a value below 1 proves r-unsolvability."""
    c = _as_config(c)
    dist = g.distances[r]
    if any(d < 0 and c.counts[v] for v, d in enumerate(dist)):
        raise ValueError("weight bound needs a connected graph")
    return sum((Fraction(x, 2 ** dist[v]) for v, x in enumerate(c.counts) if x), Fraction(0))


def pi_bounds(g: Graph) -> tuple[int, int]:
    """(max{n, 2^diam}, n 2^diam)."""
    if not g.is_connected:
        raise ValueError("pebbling bounds need a connected graph")
    diam = int(diameter(g))
    return max(g.n, 2**diam), g.n * 2**diam


class _RootSearch:
    """Memoised r-solvability search for one root of one graph.

    Only states the search actually expands are remembered, in two sets.
    Leaves that are decided by the direct-push or collection tests are
    cheap to re-test and are not stored.  When the sets outgrow
    ``memo_limit`` they are dropped; this costs time, never correctness.
    """

    def __init__(self, g: Graph, r: int, memo_limit: int | None = None):
        n = g.n
        self.g, self.r, self.n = g, r, n
        self.dist = dist = g.distances[r]
        if any(d < 0 for d in dist):
            raise ValueError("r-solvability needs a connected graph")
        # c[v] >= 2^dist(v) solves directly along a shortest path
        self.direct = [2**d for d in dist]
        self.moves = [
            tuple(sorted((u for u in g.adjacency[v] if u != r), key=lambda u: (dist[u], u)))
            for v in range(n)
        ]
        self.parent = [
            min((u for u in g.adjacency[v] if dist[u] == dist[v] - 1), default=-1)
            for v in range(n)
        ]
        self.collect: list[tuple[list[int], int]] = []
        sub = Graph(tuple(() if v == r else tuple(u for u in g.adjacency[v] if u != r) for v in range(n)))
        for a in g.adjacency[r]:
            da = sub.distances[a]
            top = max(da)
            w = [0 if (x < 0 or v == r) else 1 << (top - x) for v, x in enumerate(da)]
            self.collect.append((w, 2 << top))
        exact = max(self.direct)
        if exact <= 256:
            self.encode = bytes
        else:
            import array

            code = "H" if exact <= 1 << 16 else "Q"
            self.encode = lambda c: array.array(code, c).tobytes()
        self.solved: set[bytes] = set()
        self.failed: set[bytes] = set()
        self.memo_limit = memo_limit
        self.explored = 0

    def _direct(self, c: Sequence[int]) -> int:
        direct = self.direct
        for v, x in enumerate(c):
            if x >= direct[v]:
                return v
        return -1

    def _weights(self, c: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(x * y for x, y in zip(c, w)) for w, _ in self.collect)

    def _dead(self, ws: tuple[int, ...]) -> bool:
        return all(x < goal for x, (_, goal) in zip(ws, self.collect))

    def _trim(self) -> None:
        if self.memo_limit is not None and len(self.solved) + len(self.failed) > self.memo_limit:
            self.solved.clear()
            self.failed.clear()

    def solve(self, c: Sequence[int], budget: int) -> bool:
        """True iff c is r-solvable; raises BudgetExceeded after ``budget`` new states."""
        if self._direct(c) >= 0:
            return True
        solved, failed, encode = self.solved, self.failed, self.encode
        key = encode(c)
        if key in failed:
            return False
        if key in solved:
            return True
        ws = self._weights(c)
        if self._dead(ws):
            return False
        self._trim()
        limit = self.explored + budget
        collect, direct = self.collect, self.direct
        self.explored += 1
        stack = [(key, list(c), ws, self._children(c))]
        while stack:
            key, cur, ws, it = stack[-1]
            descended = success = False
            for v, u in it:
                if cur[u] + 1 >= direct[u]:
                    success = True
                    break
                child = cur.copy()
                child[v] -= 2
                child[u] += 1
                ckey = encode(child)
                if ckey in failed:
                    continue
                if ckey in solved:
                    success = True
                    break
                cws = tuple(x - 2 * w[v] + w[u] for x, (w, _) in zip(ws, collect))
                if self._dead(cws):
                    continue
                if self.explored >= limit:
                    raise BudgetExceeded
                self.explored += 1
                stack.append((ckey, child, cws, self._children(child)))
                descended = True
                break
            if descended:
                continue
            if success:
                solved.update(frame[0] for frame in stack)
                return True
            failed.add(key)
            stack.pop()
        return False

    def _children(self, c: list[int]):
        moves = self.moves
        for v, x in enumerate(c):
            if x >= 2:
                for u in moves[v]:
                    yield v, u

    def witness(self, c: Sequence[int], budget: int = DEFAULT_BUDGET) -> tuple[tuple[int, int], ...]:
        """Explicit move list for a solvable c, following memoised decisions."""
        cur = list(c)
        out: list[tuple[int, int]] = []
        while True:
            v = self._direct(cur)
            if v >= 0:
                while v != self.r:
                    p = self.parent[v]
                    out.extend([(v, p)] * (self.direct[v] // 2))
                    v = p
                return tuple(out)
            for v, u in self._children(cur):
                child = cur.copy()
                child[v] -= 2
                child[u] += 1
                if self.solve(child, budget):
                    out.append((v, u))
                    cur = child
                    break
            else:
                raise AssertionError("witness requested for an unsolvable configuration")


class PebblingSolver:
    """Per-graph solver holding one memoised search per root.

    Reusing a solver across many queries on the same graph (Monte Carlo
    trials, pebbling-number searches) lets later queries hit earlier work.
    """

    def __init__(self, g: Graph, memo_limit: int | None = DEFAULT_MEMO_LIMIT):
        if not g.is_connected:
            raise ValueError("pebbling solver needs a connected graph")
        self.graph = g
        self.memo_limit = memo_limit
        self._roots: dict[int, _RootSearch] = {}
        self._released = 0

    def root(self, r: int) -> _RootSearch:
        search = self._roots.get(r)
        if search is None:
            search = self._roots[r] = _RootSearch(self.graph, r, self.memo_limit)
        return search

    @property
    def explored(self) -> int:
        """Configurations expanded so far, over all roots."""
        return self._released + sum(s.explored for s in self._roots.values())

    def release(self, r: int) -> None:
        """Forget root r's memo (its explored count is kept)."""
        search = self._roots.pop(r, None)
        if search is not None:
            self._released += search.explored

    def clear(self) -> None:
        for r in list(self._roots):
            self.release(r)

    def r_solvable(self, c, r: int, budget: int = DEFAULT_BUDGET) -> SolveVerdict:
        c = _as_config(c)
        if len(c) != self.graph.n:
            raise ValueError("configuration length does not match the graph")
        if not 0 <= r < self.graph.n:
            raise ValueError(f"root {r} out of range")
        if c.counts[r] >= 1:
            return SolveVerdict(Status.SOLVABLE, witness=(), root=r)
        search = self.root(r)
        before = search.explored
        try:
            ok = search.solve(c.counts, budget)
        except BudgetExceeded:
            return SolveVerdict(Status.UNKNOWN, nodes_explored=search.explored - before, root=r)
        spent = search.explored - before
        if ok:
            return SolveVerdict(Status.SOLVABLE, witness=search.witness(c.counts), nodes_explored=spent, root=r)
        w = weight_bound(self.graph, c, r)
        if w < 1:
            cert = f"weight bound {w} < 1"
        else:
            cert = f"exhaustive search (weight {w})"
        return SolveVerdict(Status.UNSOLVABLE, certificate=cert, nodes_explored=spent, weight=w, root=r)

    def solvable(self, c, budget: int = DEFAULT_BUDGET) -> SolveVerdict:
        c = _as_config(c)
        spent = 0
        unknown = None
        for r in range(self.graph.n):
            verdict = self.r_solvable(c, r, budget)
            spent += verdict.nodes_explored
            if verdict.status is Status.UNSOLVABLE:
                return SolveVerdict(
                    Status.UNSOLVABLE,
                    certificate=f"root {r}: {verdict.certificate}",
                    nodes_explored=spent,
                    weight=verdict.weight,
                    root=r,
                )
            if verdict.status is Status.UNKNOWN and unknown is None:
                unknown = r
        if unknown is not None:
            return SolveVerdict(Status.UNKNOWN, nodes_explored=spent, root=unknown)
        return SolveVerdict(Status.SOLVABLE, nodes_explored=spent)

    def max_unsolvable(self, r: int, floor: int, budget: int, stop_above: int | None = None):
        """Largest r-unsolvable total exceeding ``floor``, by branch and bound.

        Returns ``(total, counts)`` for the best configuration found, or
        ``(floor, None)`` if none beats ``floor``.  With ``stop_above`` the
        search returns as soon as a total above it is found.  Also returns
        the root-level bound ``sum of single-vertex maxima`` as third item.
        """
        search = self.root(r)
        g = self.graph
        limit = search.explored + budget
        dist = search.dist
        order = sorted((v for v in range(g.n) if v != r), key=lambda v: (-dist[v], v))
        c = [0] * g.n
        best = [floor, None]

        def unsolvable() -> bool:
            left = limit - search.explored
            if left <= 0:
                raise BudgetExceeded
            return not search.solve(c, left)

        def cap(v: int, start: int) -> int:
            for k in range(start, 0, -1):
                c[v] = k
                if unsolvable():
                    c[v] = 0
                    return k
            c[v] = 0
            return 0

        caps0 = [cap(v, search.direct[v] - 1) for v in order]
        root_bound = sum(caps0)
        if root_bound <= floor:
            return floor, None, root_bound

        class _Done(Exception):
            pass

        def rec(i: int, tot: int, caps: list[int]) -> None:
            if tot > best[0]:
                best[0], best[1] = tot, tuple(c)
                if stop_above is not None and tot > stop_above:
                    raise _Done
            if i == len(order):
                return
            v = order[i]
            rest = caps[1:]
            rest_sum = sum(rest)
            for k in range(caps[0], -1, -1):
                if tot + k + rest_sum <= best[0]:
                    break
                c[v] = k
                bound = tot + k + rest_sum
                refined = []
                for j, old in enumerate(rest):
                    new = cap(order[i + 1 + j], old)
                    bound -= old - new
                    refined.append(new)
                    if bound <= best[0]:
                        break
                else:
                    rec(i + 1, tot + k, refined)
            c[v] = 0

        try:
            rec(0, 0, caps0)
        except _Done:
            pass
        return best[0], best[1], root_bound


def is_r_solvable(g: Graph, c, r: int, budget: int = DEFAULT_BUDGET, solver: PebblingSolver | None = None) -> SolveVerdict:
    return (solver or PebblingSolver(g)).r_solvable(c, r, budget)


def is_solvable(g: Graph, c, budget: int = DEFAULT_BUDGET, solver: PebblingSolver | None = None) -> SolveVerdict:
    return (solver or PebblingSolver(g)).solvable(c, budget)


def _lower_witness(g: Graph) -> tuple[Configuration, int, int]:
    """A (lower - 1)-pebble configuration, its root, and lower."""
    lower, _ = pi_bounds(g)
    diam = int(diameter(g))
    if 2**diam >= g.n:
        x, y = next((x, y) for x in range(g.n) for y in range(g.n) if g.distances[x][y] == diam)
        return Configuration.single(g.n, x, 2**diam - 1), y, lower
    counts = [1] * g.n
    counts[0] = 0
    return Configuration(tuple(counts)), 0, lower


def _search_pi(g: Graph, budget: int, stop_above: int | None = None, solver: PebblingSolver | None = None) -> PebblingResult:
    solver = solver or PebblingSolver(g)
    witness, witness_root, lower = _lower_witness(g)
    _, upper = pi_bounds(g)
    start = solver.explored
    check = solver.r_solvable(witness, witness_root, budget)
    if check.status is not Status.UNSOLVABLE:
        raise AssertionError(f"lower-bound witness is not unsolvable: {check}")
    best = lower - 1
    hi = 0
    done = 0
    exhausted = False
    for r in range(g.n):
        left = budget - (solver.explored - start)
        if left <= 0:
            exhausted = True
            break
        try:
            total, counts, root_bound = solver.max_unsolvable(r, best, left, stop_above)
        except BudgetExceeded:
            exhausted = True
            break
        done += 1
        solver.release(r)
        if counts is not None:
            best = total
            witness, witness_root = Configuration(counts), r
            if stop_above is not None and best > stop_above:
                break
    if exhausted:
        pending = range(done, g.n)
        # any r-unsolvable total is at most the sum of per-vertex single maxima
        bound = max(sum(2 ** g.distances[r][v] - 1 for v in range(g.n)) for r in pending)
        hi = min(upper, max(best, bound) + 1)
    else:
        hi = best + 1
    return PebblingResult(
        lower=best + 1,
        upper=hi if not (stop_above is not None and best > stop_above) else upper,
        witness_config=witness,
        witness_root=witness_root,
        roots_checked=done,
        nodes_explored=solver.explored - start,
    )


def pebbling_number(g: Graph, budget: int = DEFAULT_BUDGET, solver: PebblingSolver | None = None) -> PebblingResult:
    """π(G) = 1 + max over roots of the largest r-unsolvable total."""
    if not g.is_connected:
        raise ValueError("pebbling number needs a connected graph")
    if g.n == 1:
        return PebblingResult(1, 1, Configuration((0,)), 0, 1, 0)
    return _search_pi(g, budget, solver=solver)


def class0(g: Graph, budget: int = DEFAULT_BUDGET) -> bool | None:
    """True iff π(G) = n(G); None when the budget runs out first."""
    lower, _ = pi_bounds(g)
    if lower > g.n:
        return False
    if g.n == 1:
        return True
    result = _search_pi(g, budget, stop_above=g.n - 1)
    if result.lower > g.n:
        return False
    return True if result.exact else None


@dataclass(frozen=True)
class GrahamReport:
    pi_g: PebblingResult
    pi_h: PebblingResult
    pi_product: PebblingResult
    product_n: int = field(default=0)

    @property
    def bound(self) -> int | None:
        if self.pi_g.exact and self.pi_h.exact:
            return self.pi_g.lower * self.pi_h.lower
        return None

    @property
    def holds(self) -> bool | None:
        """Truth of π(G□H) <= π(G)π(H), or None if undecided within budget."""
        if self.pi_product.upper <= self.pi_g.lower * self.pi_h.lower:
            return True
        if self.pi_product.lower > self.pi_g.upper * self.pi_h.upper:
            return False
        return None

    @property
    def slack(self) -> int | None:
        if self.bound is None or not self.pi_product.exact:
            return None
        return self.bound - self.pi_product.lower


def graham_check(g: Graph, h: Graph, budget: int = DEFAULT_BUDGET) -> GrahamReport:
    product = cartesian_product(g, h)
    return GrahamReport(
        pi_g=pebbling_number(g, budget),
        pi_h=pebbling_number(h, budget),
        pi_product=pebbling_number(product, budget),
        product_n=product.n,
    )
