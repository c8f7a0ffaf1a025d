from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pebblelab.graph import Graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str = "") -> None:
    """Remember one acceptance outcome; a criterion fails if any of its parts fails."""
    prev_ok, prev_detail = ACCEPTANCE.get(criterion, (True, ""))
    joined = "; ".join(x for x in (prev_detail, detail) if x)
    ACCEPTANCE[criterion] = (prev_ok and ok, joined)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@st.composite
def connected_graphs(draw, min_n: int = 1, max_n: int = 7, extra: float | None = None):
    """Random spanning tree plus a random set of extra edges."""
    n = draw(st.integers(min_n, max_n))
    edges = set()
    for v in range(1, n):
        edges.add((draw(st.integers(0, v - 1)), v))
    others = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in edges]
    if others:
        chosen = draw(st.lists(st.sampled_from(others), unique=True, max_size=len(others)))
        edges.update(chosen)
    return Graph.from_edges(n, sorted(edges))


@st.composite
def graphs(draw, max_n: int = 7):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def random_connected_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    edges |= {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p}
    return Graph.from_edges(n, sorted(edges))


@pytest.fixture
def rng():
    return random.Random(12345)
