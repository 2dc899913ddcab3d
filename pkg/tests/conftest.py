"""Shared fixtures and naive reference implementations.

The reference functions here are deliberately written against plain Python
sets and ``itertools`` so they share no code with the package kernels.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import pytest

from graphcontainers import Graph, VertexSet


def from_nx(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h)
    return Graph.from_edges(h.number_of_nodes(), h.edges())


@lru_cache(maxsize=None)
def atlas_graphs(max_n: int = 6) -> tuple[Graph, ...]:
    """Every graph on 1..max_n vertices up to isomorphism."""
    return tuple(from_nx(h) for h in nx.graph_atlas_g() if 1 <= h.number_of_nodes() <= max_n)


def random_graph(rnd: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rnd.random() < p])


def random_subset(rnd: random.Random, n: int, nonempty: bool = False) -> VertexSet:
    while True:
        s = VertexSet(rnd.getrandbits(n), n)
        if s or not nonempty:
            return s


def naive_within(g: Graph, s) -> int:
    return sum(1 for u, v in itertools.combinations(sorted(s), 2) if g.has_edge(u, v))


def naive_deg_in(g: Graph, v: int, s) -> int:
    return sum(1 for u in s if u != v and g.has_edge(u, v))


def naive_min_edges(g: Graph, k: int) -> int:
    return min(naive_within(g, c) for c in itertools.combinations(range(g.n), k))


def naive_mrr(g: Graph, j: set[int], c: set[int], eps, rho, ell):
    """Brute-force maximum removal ratio as (ratio squared, vertex, direction)."""
    tau_sq = Fraction(eps) ** 2 * len(j) ** 2 / (Fraction(ell) * Fraction(rho) ** 4)
    deg_c = {u: naive_deg_in(g, u, c) for u in c}
    best = None
    for v in sorted(j):
        # numerator: degree of v in G[C + v]; denominator: degree of v in G[J]
        down = (naive_deg_in(g, v, c), naive_deg_in(g, v, j))
        dv = naive_deg_in(g, v, c)
        up_set = {u for u in c if deg_c[u] > dv}
        up = (len(up_set), len(up_set & j))
        for direction, (num, den) in (("down", down), ("up", up)):
            sq = Fraction(num * num) / max(Fraction(den * den), tau_sq)
            if best is None or sq > best[0]:
                best = (sq, v, direction)
    return best


@pytest.fixture
def k4() -> Graph:
    return Graph.complete(4)


@pytest.fixture
def c4() -> Graph:
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def path3() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def star() -> Graph:
    return Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


# one summary line per acceptance criterion

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = report.user_properties and dict(report.user_properties).get("criterion")
    if mark:
        number, title = mark
        _CRITERIA[number] = (title, report.outcome)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker and ("criterion", marker.args) not in item.user_properties:
        item.user_properties.append(("criterion", marker.args))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome = _CRITERIA[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
