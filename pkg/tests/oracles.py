"""Slow, obviously-correct reference implementations used only by tests."""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction

from pebblelab.graph import Graph

INF = math.inf


def floyd_warshall(g: Graph) -> list[list[float]]:
    n = g.n
    D = [[0 if i == j else (1 if g.has_edge(i, j) else INF) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if D[i][k] + D[k][j] < D[i][j]:
                    D[i][j] = D[i][k] + D[k][j]
    return D


def diameter(g: Graph) -> float:
    if g.n == 0:
        return 0
    return max(max(row) for row in floyd_warshall(g))


def girth(g: Graph) -> float:
    """Shortest cycle through each edge: remove it, then BFS between its ends."""
    best = INF
    for u, v in g.edges():
        dist = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if {x, y} == {u, v} or y in dist:
                    continue
                dist[y] = dist[x] + 1
                queue.append(y)
        if v in dist:
            best = min(best, dist[v] + 1)
    return best


def _connected_without(g: Graph, removed: set[int]) -> bool:
    left = [v for v in range(g.n) if v not in removed]
    if len(left) <= 1:
        return True
    seen = {left[0]}
    stack = [left[0]]
    while stack:
        x = stack.pop()
        for y in g.adjacency[x]:
            if y not in removed and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(left)


def connectivity(g: Graph) -> int:
    """Smallest vertex set whose removal disconnects g; n-1 if none exists."""
    n = g.n
    if n <= 1:
        return 0
    for k in range(n - 1):
        for cut in itertools.combinations(range(n), k):
            if not _connected_without(g, set(cut)):
                return k
    return n - 1


def reachable_r_solvable(g: Graph, c, r: int) -> bool:
    """Breadth-first search over every reachable configuration, no pruning."""
    start = tuple(c)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur[r] >= 1:
            return True
        for v in range(g.n):
            if cur[v] >= 2:
                for u in g.adjacency[v]:
                    nxt = list(cur)
                    nxt[v] -= 2
                    nxt[u] += 1
                    nxt = tuple(nxt)
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
    return False


def configurations(n: int, t: int):
    """All t-pebble configurations on n vertices, by recursion."""
    if n == 1:
        yield (t,)
        return
    for first in range(t + 1):
        for rest in configurations(n - 1, t - first):
            yield (first,) + rest


def solvable(g: Graph, c) -> bool:
    return all(reachable_r_solvable(g, c, r) for r in range(g.n))


def pebbling_number(g: Graph) -> int:
    t = 1
    while not all(solvable(g, c) for c in configurations(g.n, t)):
        t += 1
    return t


def solvability_probability(g: Graph, t: int) -> Fraction:
    configs = list(configurations(g.n, t))
    return Fraction(sum(solvable(g, c) for c in configs), len(configs))


def cycles(g: Graph, max_len: int) -> set[tuple[int, ...]]:
    """Canonical cycles by trying every vertex ordering of every small subset."""
    out = set()
    for k in range(3, max_len + 1):
        for subset in itertools.combinations(range(g.n), k):
            first, rest = subset[0], subset[1:]
            for perm in itertools.permutations(rest):
                cyc = (first,) + perm
                if cyc[1] > cyc[-1]:
                    continue
                if all(g.has_edge(cyc[i], cyc[(i + 1) % k]) for i in range(k)):
                    out.add(cyc)
    return out
