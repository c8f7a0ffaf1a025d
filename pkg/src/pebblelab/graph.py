"""Simple undirected graphs, generators, Cartesian products and exact metrics.

Vertices are the integers ``0..n-1``.  A :class:`Graph` is immutable; the
distance matrix and the metrics derived from it are cached on first use.

Disconnected graphs have infinite diameter and acyclic graphs infinite
girth; both are reported with the :data:`INF` sentinel instead of raising,
since intermediate stages of the girth pipeline routinely produce forests.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

INF = math.inf


class GraphFormatError(ValueError):
    """Raised when a graph text file is malformed."""


@dataclass(frozen=True)
class Graph:
    adjacency: tuple[tuple[int, ...], ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        adj = tuple(tuple(sorted(int(u) for u in nbrs)) for nbrs in self.adjacency)
        n = len(adj)
        for v, nbrs in enumerate(adj):
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"duplicate neighbour at vertex {v}")
            for u in nbrs:
                if not 0 <= u < n:
                    raise ValueError(f"neighbour {u} of {v} out of range")
                if u == v:
                    raise ValueError(f"self-loop at vertex {v}")
        for v, nbrs in enumerate(adj):
            for u in nbrs:
                if v not in adj[u]:
                    raise ValueError(f"asymmetric adjacency between {v} and {u}")
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], label: str = "") -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {u} {v} out of range for {n} vertices")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(tuple(tuple(s) for s in nbrs), label)

    @property
    def n(self) -> int:
        return len(self.adjacency)

    vertex_count = n

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    @property
    def min_degree(self) -> int:
        return min((len(nbrs) for nbrs in self.adjacency), default=0)

    @cached_property
    def distances(self) -> tuple[tuple[int, ...], ...]:
        """All-pairs BFS distances; ``-1`` marks unreachable pairs."""
        return tuple(bfs_distances(self, s) for s in range(self.n))

    def distance(self, u: int, v: int) -> float:
        d = self.distances[u][v]
        return INF if d < 0 else d

    @cached_property
    def is_connected(self) -> bool:
        return self.n > 0 and all(d >= 0 for d in self.distances[0])

    def relabel(self, label: str) -> "Graph":
        return Graph(self.adjacency, label)

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"<Graph{name} n={self.n} m={self.edge_count}>"


@dataclass(frozen=True)
class GraphMetrics:
    diameter: float
    girth: float
    min_degree: int
    connectivity: int


def bfs_distances(g: Graph, source: int) -> tuple[int, ...]:
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return tuple(dist)


def shortest_path(g: Graph, source: int, target: int) -> list[int]:
    """A shortest path from ``source`` to ``target``, lowest-index parents first."""
    parent = [-1] * g.n
    parent[source] = source
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if u == target:
            break
        for w in g.adjacency[u]:
            if parent[w] < 0:
                parent[w] = u
                queue.append(w)
    if parent[target] < 0:
        raise ValueError(f"no path from {source} to {target}")
    path = [target]
    while path[-1] != source:
        path.append(parent[path[-1]])
    return path[::-1]


# --- generators -----------------------------------------------------------


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)), f"P{n}")


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least three vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)), f"C{n}")


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete graph needs at least one vertex")
    return Graph.from_edges(n, combinations(range(n), 2), f"K{n}")


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)), f"K1,{leaves}")


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner, "Petersen")


def grid(n: int, d: int) -> Graph:
    """The d-dimensional grid P_n^d; vertex (x_1..x_d) has index sum x_k n^(d-k)."""
    if n < 1 or d < 1:
        raise ValueError("grid needs n >= 1 and d >= 1")
    g = path(n)
    for _ in range(d - 1):
        g = cartesian_product(path(n), g)
    return g.relabel(f"P{n}^{d}")


def hypercube(d: int) -> Graph:
    return grid(2, d).relabel(f"Q{d}")


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """G□H with vertex (u, v) flattened to ``u * n(h) + v``."""
    if g.n == 0 or h.n == 0:
        raise ValueError("cartesian product of an empty graph")
    nh = h.n
    edges = []
    for u in range(g.n):
        for v, w in h.edges():
            edges.append((u * nh + v, u * nh + w))
    for u, u2 in g.edges():
        for v in range(nh):
            edges.append((u * nh + v, u2 * nh + v))
    label = f"{g.label}x{h.label}" if g.label and h.label else ""
    return Graph.from_edges(g.n * nh, edges, label)


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    params: tuple = ()

    KINDS = {
        "path": 1,
        "cycle": 1,
        "complete": 1,
        "hypercube": 1,
        "grid": 2,
        "star": 1,
        "petersen": 0,
        "gnp": 3,
        "file": 1,
    }

    @classmethod
    def parse(cls, tokens: Sequence[str] | str, seed: int | None = None) -> "GraphSpec":
        """Parse ``"grid 3 2"``-style tokens; an unknown first token is a file path."""
        if isinstance(tokens, str):
            tokens = tokens.split()
        if not tokens:
            raise ValueError("empty graph spec")
        kind, *rest = tokens
        if kind not in cls.KINDS:
            if len(tokens) == 1:
                return cls("file", (kind,))
            raise ValueError(f"unknown graph family {kind!r}")
        if kind == "file":
            if len(rest) != 1:
                raise ValueError("file takes one path")
            return cls(kind, (rest[0],))
        if kind == "gnp":
            if len(rest) == 3:
                seed = int(rest[2])
            elif len(rest) != 2:
                raise ValueError("gnp needs: n p [seed]")
            if seed is None:
                raise ValueError("gnp needs a seed")
            return cls(kind, (int(rest[0]), float(rest[1]), int(seed)))
        if len(rest) != cls.KINDS[kind]:
            raise ValueError(f"{kind} takes {cls.KINDS[kind]} parameter(s)")
        return cls(kind, tuple(int(x) for x in rest))

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.params)])


def generate(spec: GraphSpec | str) -> Graph:
    if isinstance(spec, str):
        spec = GraphSpec.parse(spec)
    kind, params = spec.kind, spec.params
    if kind == "file":
        return read_graph(params[0])
    if kind == "gnp":
        from .girth import sample_gnp

        n, p, seed = params
        if n < 1:
            raise ValueError("gnp needs n >= 1")
        return sample_gnp(n, p, seed)
    if any(x < 1 for x in params):
        raise ValueError(f"{kind} parameters must be positive, got {params}")
    makers = {
        "path": path,
        "cycle": cycle,
        "complete": complete,
        "hypercube": hypercube,
        "grid": grid,
        "star": star,
        "petersen": petersen,
    }
    return makers[kind](*params)


# --- text format ------------------------------------------------------------


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str, label: str = "") -> Graph:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    if not rows or len(rows[0]) != 2:
        raise GraphFormatError("header must be 'n m'")
    try:
        n, m = map(int, rows[0])
        edges = [tuple(map(int, r)) for r in rows[1:]]
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None
    if len(edges) != m:
        raise GraphFormatError(f"header promises {m} edges, found {len(edges)}")
    seen = set()
    for e in edges:
        if len(e) != 2:
            raise GraphFormatError(f"bad edge line {e}")
        u, v = e
        if not (0 <= u < v < n):
            raise GraphFormatError(f"edge {u} {v} out of range or not u<v")
        if e in seen:
            raise GraphFormatError(f"duplicate edge {u} {v}")
        seen.add(e)
    return Graph.from_edges(n, edges, label)


def read_graph(path_like) -> Graph:
    p = Path(path_like)
    return parse_graph(p.read_text(), p.stem)


def write_graph(g: Graph, path_like) -> None:
    Path(path_like).write_text(format_graph(g))


# --- metrics ------------------------------------------------------------------


def diameter(g: Graph) -> float:
    if g.n == 0:
        return 0
    if not g.is_connected:
        return INF
    return max(max(row) for row in g.distances)


def girth(g: Graph) -> float:
    """Shortest cycle length via BFS from every vertex (exact for simple graphs)."""
    best = INF
    for s in range(g.n):
        dist = [-1] * g.n
        parent = [-1] * g.n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in g.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


class _SplitNetwork:
    """Unit-capacity vertex-split flow network: v_in = 2v, v_out = 2v + 1."""

    def __init__(self, g: Graph):
        self.size = 2 * g.n
        self.head: list[list[int]] = [[] for _ in range(self.size)]
        self.to: list[int] = []
        self.cap0: list[int] = []
        for v in range(g.n):
            self._arc(2 * v, 2 * v + 1)
        for u, v in g.edges():
            self._arc(2 * u + 1, 2 * v)
            self._arc(2 * v + 1, 2 * u)

    def _arc(self, a: int, b: int) -> None:
        self.head[a].append(len(self.to))
        self.to.append(b)
        self.cap0.append(1)
        self.head[b].append(len(self.to))
        self.to.append(a)
        self.cap0.append(0)

    def max_flow(self, s: int, t: int, limit: int) -> int:
        """Number of internally disjoint s-t paths, stopping at ``limit``."""
        cap = list(self.cap0)
        source, sink = 2 * s + 1, 2 * t
        flow = 0
        to, head = self.to, self.head
        while flow < limit:
            pred = [-1] * self.size
            pred[source] = -2
            queue = deque([source])
            while queue and pred[sink] == -1:
                a = queue.popleft()
                for e in head[a]:
                    b = to[e]
                    if cap[e] and pred[b] == -1:
                        pred[b] = e
                        queue.append(b)
            if pred[sink] == -1:
                break
            b = sink
            while b != source:
                e = pred[b]
                cap[e] -= 1
                cap[e ^ 1] += 1
                b = to[e ^ 1]
            flow += 1
        return flow


def local_connectivity(g: Graph, s: int, t: int) -> int:
    """Maximum number of internally vertex-disjoint paths between non-adjacent s, t."""
    if s == t or g.has_edge(s, t):
        raise ValueError("local connectivity needs distinct non-adjacent vertices")
    return _SplitNetwork(g).max_flow(s, t, g.n)


def vertex_connectivity(g: Graph) -> int:
    """Minimum vertex cut size; complete graphs get n - 1.

    Uses a minimum-degree vertex v: every minimum separator either misses v
    (so it separates v from some non-neighbour) or contains v (so it
    separates two non-adjacent neighbours of v).
    """
    n = g.n
    if n <= 1:
        return 0
    v = min(range(n), key=lambda x: (g.degree(x), x))
    best = g.degree(v)
    if best == 0:
        return 0
    net = _SplitNetwork(g)
    nbrs = set(g.adjacency[v])
    for w in range(n):
        if w != v and w not in nbrs:
            best = min(best, net.max_flow(v, w, best))
            if best == 0:
                return 0
    for x, y in combinations(g.adjacency[v], 2):
        if not g.has_edge(x, y):
            best = min(best, net.max_flow(x, y, best))
    return best


def metrics(g: Graph) -> GraphMetrics:
    return GraphMetrics(
        diameter=diameter(g),
        girth=girth(g),
        min_degree=g.min_degree,
        connectivity=vertex_connectivity(g),
    )


# --- disjoint paths in products ------------------------------------------------------


def product_disjoint_paths(g: Graph, h: Graph, v, w) -> list[list[int]]:
    """min(δ(G), δ(H)) internally disjoint v-w paths in G□H.

    ``v`` and ``w`` are ``(g-coordinate, h-coordinate)`` pairs or flat
    indices.  Each path starts at a neighbour w_i of w in the G-direction,
    walks a shortest H-path to the H-coordinate of a neighbour v_i of v,
    then a shortest G-path to v_i.  Neighbours are matched in order of
    distance (G-distance to v's G-coordinate, H-distance to w's
    H-coordinate), ties by index; distances are always taken in the factor
    graphs.  Paths are returned as flat index lists from v to w.
    """
    nh = h.n
    gv, hv = divmod(v, nh) if isinstance(v, int) else v
    gw, hw = divmod(w, nh) if isinstance(w, int) else w
    if (gv, hv) == (gw, hw):
        raise ValueError("endpoints must differ")
    if not (g.is_connected and h.is_connected):
        raise ValueError("factor graphs must be connected")
    delta = min(g.min_degree, h.min_degree)
    flat = lambda a, b: a * nh + b  # noqa: E731
    vf, wf = flat(gv, hv), flat(gw, hw)

    dist_g = g.distances[gv]
    dist_h = h.distances[hw]
    v_side = [b for b in h.adjacency[hv]]
    w_side = [a for a in g.adjacency[gw]]
    adjacent = (gv == gw and h.has_edge(hv, hw)) or (hv == hw and g.has_edge(gv, gw))
    paths: list[list[int]] = []
    count = delta
    if adjacent:
        # the edge vw is one path; match the remaining neighbours
        if gv == gw:
            v_side.remove(hw)
        else:
            w_side.remove(gv)
        count -= 1
        if delta > 0:
            paths.append([vf, wf])
    v_side.sort(key=lambda b: (dist_h[b], b))
    w_side.sort(key=lambda a: (dist_g[a], a))

    for hi, gi in zip(v_side[:count], w_side[:count]):
        h_leg = shortest_path(h, hw, hi)
        g_leg = shortest_path(g, gi, gv)
        body = [flat(gi, y) for y in h_leg] + [flat(x, hi) for x in g_leg[1:]]
        full = [wf] + body + [vf]
        start = len(full) - 1 - full[::-1].index(wf)
        end = full.index(vf, start)
        paths.append(full[start : end + 1][::-1])
    paths.sort(key=len)
    return paths
