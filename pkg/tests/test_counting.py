from fractions import Fraction

import networkx as nx
import pytest

from conftest import from_nx
from graphcontainers import Graph
from graphcontainers.counting import (
    container_count_bound,
    count_independent_exact,
    count_sparse_exact,
    markov_density_count,
    remark52_count,
    remark52_formula,
)
from graphcontainers.generators import gnp, kdd_union
from graphcontainers.oracles import GuardError, SparsityPredicate


class TestExactCounts:
    def test_k22_independent(self):
        assert count_sparse_exact(kdd_union(1, 2), SparsityPredicate.independent()) == 7

    def test_empty_graph(self):
        for pred in (SparsityPredicate.independent(), SparsityPredicate.density_le(Fraction(0))):
            assert count_sparse_exact(Graph.empty(7), pred) == 2**7

    def test_two_copies(self):
        assert count_sparse_exact(kdd_union(2, 2), SparsityPredicate.independent()) == 49

    def test_complete_graph(self):
        assert count_independent_exact(Graph.complete(9)) == 10

    def test_edgeless(self):
        assert count_independent_exact(Graph.empty(11)) == 2**11

    @pytest.mark.parametrize("c,d", [(1, 2), (2, 2), (1, 3), (3, 2), (2, 3)])
    def test_kdd_formula(self, c, d):
        assert count_independent_exact(kdd_union(c, d)) == (2 ** (d + 1) - 1) ** c

    def test_matches_networkx(self):
        for seed in range(10):
            g = gnp(10, Fraction(1, 2), seed)
            base = nx.Graph(g.edges())
            base.add_nodes_from(range(g.n))
            h = nx.complement(base)
            # independent sets of g are the cliques of its complement, plus the empty set
            assert count_independent_exact(g) == 1 + sum(1 for _ in nx.enumerate_all_cliques(h))

    def test_monotone_in_threshold(self):
        g = gnp(11, Fraction(1, 2), 3)
        counts = [count_sparse_exact(g, SparsityPredicate.density_le(Fraction(k, 12))) for k in range(13)]
        assert counts == sorted(counts) and counts[-1] == 2**11

    def test_guard(self):
        with pytest.raises(GuardError):
            count_independent_exact(Graph.empty(25))


class TestMarkov:
    def test_c4(self):
        c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        assert markov_density_count(c4, 2) == (16, True)

    def test_kdd(self):
        count, ok = markov_density_count(kdd_union(2, 2), 2)
        assert ok and count >= 128

    def test_petersen(self):
        assert markov_density_count(from_nx(nx.petersen_graph()), 3)[1]

    def test_not_regular(self):
        with pytest.raises(ValueError):
            markov_density_count(Graph.empty(5), 1)


class TestContainerBound:
    @pytest.mark.parametrize("copies,d,k", [(2, 2, 1), (3, 2, 1), (1, 4, 2)])
    def test_sound(self, copies, d, k):
        report = container_count_bound(kdd_union(copies, d), k)
        assert report.passed
        assert report.exact_count <= report.bound_terms["certificate_bound"]
        assert report.bound_terms["fingerprints"] <= report.exact_count - 1

    def test_edgeless_rejected(self):
        with pytest.raises(ValueError):
            container_count_bound(Graph.empty(6), 1)


class TestLowerBoundFamily:
    def test_d2_example(self):
        assert remark52_formula(2, 1, 100) == 4
        report = remark52_count(2, 1, 100)
        assert report.bound_terms["family_size"] == 6 and report.exact_count == 7

    @pytest.mark.parametrize("d,copies,k", [(2, 2, 100), (4, 2, 1), (4, 1, Fraction(1, 8)), (2, 4, 1)])
    def test_regime_checks(self, d, copies, k):
        report = remark52_count(d, copies, k)
        assert report.bound_terms["regime"]
        assert report.passed
        assert report.exact_count >= report.bound_terms["family_size"] >= report.bound_terms["formula"]

    def test_beyond_guard_skips_exact(self):
        report = remark52_count(6, 2, 1, guard=20)
        assert report.exact_count is None and report.comparisons["family_ge_formula"]
