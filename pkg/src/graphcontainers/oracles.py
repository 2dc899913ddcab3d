"""Exact ground truth by exhaustive or branch-and-bound search.

Everything here is exponential in ``n`` and guarded: searches refuse to run
above :data:`DEFAULT_SEARCH_GUARD` (pruned searches) or
:data:`DEFAULT_ENUM_GUARD` (full subset enumeration) unless the caller passes
a larger guard explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import kernels
from .exact import as_fraction, fraction_str
from .graph import Graph, VertexSet, edge_count_within

DEFAULT_SEARCH_GUARD = 24
DEFAULT_ENUM_GUARD = 20


class GuardError(RuntimeError):
    """The instance is too large for exact search under the active guard."""


def check_guard(n: int, guard: int, what: str) -> None:
    if n > guard:
        raise GuardError(f"{what} needs exact search over n={n} vertices; guard is {guard} (raise it to override)")
    if n > kernels.MAX_KERNEL_N:
        raise GuardError(f"{what} supports at most {kernels.MAX_KERNEL_N} vertices")


@dataclass(frozen=True)
class SparsityPredicate:
    """Which subsets count as sparse, as a per-size edge budget.

    ``kind`` is one of

    * ``"density_le"``: ``|E(S)| <= value * C(|S|, 2)``
    * ``"density_lt"``: ``|E(S)| < value * C(|S|, 2)``
    * ``"edges_lt_c_sq"``: ``|E(S)| < value * |S|^2``
    * ``"edges_le"``: ``|E(S)| <= value``

    Density forms treat sets of size at most one as satisfied (density 0 by
    convention); the other two forms apply literally.
    """

    kind: str
    value: Fraction

    KINDS = ("density_le", "density_lt", "edges_lt_c_sq", "edges_le")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown predicate kind {self.kind!r}")
        object.__setattr__(self, "value", as_fraction(self.value))
        if self.value < 0:
            raise ValueError("predicate threshold must be non-negative")

    @classmethod
    def density_le(cls, tau) -> SparsityPredicate:
        return cls("density_le", tau)

    @classmethod
    def density_lt(cls, tau) -> SparsityPredicate:
        return cls("density_lt", tau)

    @classmethod
    def edges_lt_c_sq(cls, c) -> SparsityPredicate:
        return cls("edges_lt_c_sq", c)

    @classmethod
    def independent(cls) -> SparsityPredicate:
        return cls("edges_le", Fraction(0))

    def max_edges(self, k: int) -> int:
        """Largest edge count allowed on a ``k``-set; -1 when none is."""
        v = self.value
        if self.kind == "edges_le":
            return math.floor(v)
        if self.kind == "edges_lt_c_sq":
            return math.ceil(v * k * k) - 1
        if k <= 1:
            return 0
        pairs = k * (k - 1) // 2
        if self.kind == "density_le":
            return math.floor(v * pairs)
        return math.ceil(v * pairs) - 1

    def holds(self, edges: int, k: int) -> bool:
        return edges <= self.max_edges(k)

    def budgets(self, n: int) -> np.ndarray:
        return np.array([max(-1, min(self.max_edges(k), k * (k - 1) // 2)) for k in range(n + 1)], dtype=np.int64)

    def describe(self) -> dict:
        return {"kind": self.kind, "value": fraction_str(self.value)}


@dataclass(frozen=True)
class FarnessCertificate:
    rho: Fraction
    min_edges: int
    witness: VertexSet
    eps_far_up_to: Fraction

    def to_json(self) -> dict:
        return {
            "rho": fraction_str(self.rho),
            "min_edges": self.min_edges,
            "witness": self.witness.sorted(),
            "eps_far_up_to": fraction_str(self.eps_far_up_to),
        }


def _degree_order(g: Graph) -> np.ndarray:
    degs = g.degrees()
    return np.array(sorted(range(g.n), key=lambda v: (-degs[v], v)), dtype=np.int64)


def min_subset_edges(g: Graph, k: int, guard: int = DEFAULT_SEARCH_GUARD) -> int:
    """``min |E(U)|`` over all ``k``-subsets ``U``."""
    if not 0 <= k <= g.n:
        raise ValueError(f"subset size {k} outside 0..{g.n}")
    check_guard(g.n, guard, "minimum subset edges")
    return int(kernels.min_k_subset_edges(g.words(), g.n, k, _degree_order(g)))


def first_sparse_subset(g: Graph, k: int, budget: int, guard: int = DEFAULT_SEARCH_GUARD) -> VertexSet | None:
    if not 0 <= k <= g.n:
        raise ValueError(f"subset size {k} outside 0..{g.n}")
    check_guard(g.n, guard, "sparsest subset")
    if budget < 0:
        return None
    mask = int(kernels.first_sparse_k_subset(g.words(), g.n, k, budget))
    return None if mask < 0 else VertexSet(mask, g.n)


def distance_to_indepset(g: Graph, rho, guard: int = DEFAULT_SEARCH_GUARD) -> FarnessCertificate:
    rho = as_fraction(rho)
    m = math.floor(rho * g.n)
    if m < 1:
        raise ValueError(f"floor(rho*n) = {m}; need at least 1")
    if m > g.n:
        raise ValueError("rho must not exceed 1")
    best = min_subset_edges(g, m, guard)
    witness = first_sparse_subset(g, m, best, guard)
    assert witness is not None and edge_count_within(g, witness) == best
    return FarnessCertificate(rho, best, witness, Fraction(best, g.n * g.n))


def is_eps_far(g: Graph, rho, eps, guard: int = DEFAULT_SEARCH_GUARD) -> tuple[bool, FarnessCertificate]:
    eps = as_fraction(eps)
    cert = distance_to_indepset(g, rho, guard)
    return cert.min_edges >= eps * g.n * g.n, cert


def sparsest_subset(g: Graph, size: int, budget: int, guard: int = DEFAULT_SEARCH_GUARD) -> VertexSet | None:
    """Lexicographically first ``size``-subset with at most ``budget`` edges, or None."""
    return first_sparse_subset(g, size, budget, guard)


def sparse_masks(g: Graph, predicate: SparsityPredicate, guard: int = DEFAULT_ENUM_GUARD) -> np.ndarray:
    """All qualifying subsets as an ``int64`` mask array in lexicographic order."""
    check_guard(g.n, guard, "sparse subset enumeration")
    adj = g.words()
    budgets = predicate.budgets(g.n)
    cap = kernels.budget_caps(budgets)
    total = int(kernels.sparse_subsets(adj, g.n, budgets, cap, np.empty(0, np.int64)))
    out = np.empty(total, np.int64)
    kernels.sparse_subsets(adj, g.n, budgets, cap, out)
    return out


def count_sparse(g: Graph, predicate: SparsityPredicate, guard: int = DEFAULT_ENUM_GUARD) -> int:
    check_guard(g.n, guard, "sparse subset counting")
    budgets = predicate.budgets(g.n)
    cap = kernels.budget_caps(budgets)
    return int(kernels.sparse_subsets(g.words(), g.n, budgets, cap, np.empty(0, np.int64)))


def enumerate_sparse_subsets(
    g: Graph, predicate: SparsityPredicate, guard: int = DEFAULT_ENUM_GUARD
) -> Iterator[VertexSet]:
    for mask in sparse_masks(g, predicate, guard).tolist():
        yield VertexSet(mask, g.n)
