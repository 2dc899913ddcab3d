import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import atlas_graphs, naive_deg_in, naive_within, random_graph, random_subset
from graphcontainers import Graph, GraphFormatError, VertexSet
from graphcontainers.graph import degree_in, edge_count_between, edge_count_within, edge_density, upset


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, chosen) if keep])


@st.composite
def graph_and_sets(draw, count=2):
    g = draw(graphs())
    sets = [VertexSet(draw(st.integers(0, (1 << g.n) - 1)), g.n) for _ in range(count)]
    return (g, *sets)


class TestEdgeCounts:
    def test_complete_graph(self, k4):
        assert edge_count_within(k4, k4.vertices) == 6

    def test_singleton(self, k4):
        assert edge_count_within(k4, k4.vset([2])) == 0

    def test_path_endpoints(self, path3):
        assert edge_count_within(path3, path3.vset([0, 2])) == 0

    def test_between_complete_cut(self, k4):
        assert edge_count_between(k4, k4.vset([0, 1]), k4.vset([2, 3])) == 4

    def test_between_empty_side(self, k4):
        assert edge_count_between(k4, k4.vset([0, 1]), VertexSet.empty(4)) == 0

    def test_between_same_set(self, k4):
        assert edge_count_between(k4, k4.vertices, k4.vertices) == 6

    @given(graph_and_sets())
    def test_within_matches_naive(self, case):
        g, s, _ = case
        assert edge_count_within(g, s) == naive_within(g, s)

    @given(graph_and_sets())
    def test_disjoint_union_decomposes(self, case):
        g, s, t = case
        t = t - s
        assert edge_count_within(g, s | t) == (
            edge_count_within(g, s) + edge_count_within(g, t) + edge_count_between(g, s, t)
        )

    @given(graph_and_sets())
    def test_between_counts_each_edge_once(self, case):
        g, s, t = case
        expected = sum(1 for u, v in g.edges() if (u in s and v in t) or (u in t and v in s))
        assert edge_count_between(g, s, t) == expected


class TestDegreeAndUpset:
    def test_star_center(self, star):
        assert degree_in(star, 0, star.vset([1, 2, 3])) == 3

    def test_empty_set(self, k4):
        assert degree_in(k4, 1, VertexSet.empty(4)) == 0

    def test_k4(self, k4):
        assert degree_in(k4, 0, k4.vset([1, 2, 3])) == 3

    def test_upset_star_leaf(self, star):
        assert upset(star, star.vertices, 1) == star.vset([0])

    def test_upset_regular(self, k4):
        assert not upset(k4, k4.vertices, 2)

    def test_upset_path_middle(self, path3):
        assert not upset(path3, path3.vertices, 1)

    def test_upset_exhaustive_small(self):
        for g in atlas_graphs(5):
            for bits in range(1 << g.n):
                s = VertexSet(bits, g.n)
                for v in range(g.n):
                    expected = {u for u in s if naive_deg_in(g, u, s) > naive_deg_in(g, v, s)}
                    assert set(upset(g, s, v)) == expected

    def test_upset_random_larger(self):
        rnd = random.Random(7)
        for _ in range(300):
            g = random_graph(rnd, rnd.randint(7, 16), rnd.random())
            s = random_subset(rnd, g.n)
            v = rnd.randrange(g.n)
            expected = {u for u in s if naive_deg_in(g, u, s) > naive_deg_in(g, v, s)}
            assert set(upset(g, s, v)) == expected


class TestDensity:
    def test_complete(self, k4):
        assert edge_density(k4, k4.vertices) == 1

    def test_singleton(self, k4):
        assert edge_density(k4, k4.vset([3])) == 0

    def test_cycle(self, c4):
        assert edge_density(c4, c4.vertices) == Fraction(2, 3)


class TestGraph:
    @given(graphs())
    def test_symmetric(self, g):
        for u in range(g.n):
            for v in range(g.n):
                assert g.has_edge(u, v) == g.has_edge(v, u)

    @given(graphs())
    def test_edge_list_roundtrip(self, g):
        assert Graph.from_edge_list(g.to_edge_list()) == g

    @given(graphs())
    def test_complement_twice(self, g):
        assert g.complement().complement() == g
        assert g.m + g.complement().m == g.n * (g.n - 1) // 2

    @given(graph_and_sets(count=1))
    def test_induced_relabels(self, case):
        g, s = case
        if not s:
            return
        sub, labels = g.induced(s)
        assert sub.m == edge_count_within(g, s)
        for a, b in sub.edges():
            assert g.has_edge(labels[a], labels[b])

    def test_header_only(self):
        assert Graph.from_edge_list("10 0\n") == Graph.empty(10)

    @pytest.mark.parametrize(
        "text",
        ["", "3", "3 1\n0", "3 1\n0 0", "3 1\n0 5", "3 2\n0 1\n1 0", "x y", "3 1\n0 1\n1 2"],
    )
    def test_malformed(self, text):
        with pytest.raises(GraphFormatError):
            Graph.from_edge_list(text)

    def test_rejects_asymmetric_rows(self):
        with pytest.raises(ValueError):
            Graph(2, [0b10, 0])

    def test_rejects_foreign_vertex_set(self, k4):
        with pytest.raises(IndexError):
            edge_count_within(k4, VertexSet.full(5))

    def test_vertexset_bounds(self):
        with pytest.raises(IndexError):
            VertexSet.of(3, [3])

    def test_regular_degree(self, c4, star):
        assert c4.regular_degree() == 2
        assert star.regular_degree() is None
