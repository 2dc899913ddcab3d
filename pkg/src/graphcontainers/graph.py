"""Immutable simple graphs over vertices ``0..n-1`` with bitset rows.

Vertex sets and adjacency rows are Python integers used as bitsets, so every
set operation is word-parallel and ``int.bit_count`` gives cardinalities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .kernels import MAX_KERNEL_N


class GraphFormatError(ValueError):
    """Malformed edge-list input."""


def _bits(vertices: Iterable[int]) -> int:
    bits = 0
    for v in vertices:
        bits |= 1 << v
    return bits


def iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class VertexSet:
    """A subset of ``0..n-1`` stored as a bitset."""

    bits: int
    n: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise IndexError(f"vertex set {self.bits:#x} has members outside 0..{self.n - 1}")

    @classmethod
    def of(cls, n: int, vertices: Iterable[int]) -> VertexSet:
        vertices = list(vertices)
        for v in vertices:
            if not 0 <= v < n:
                raise IndexError(f"vertex {v} out of range for n={n}")
        return cls(_bits(vertices), n)

    @classmethod
    def empty(cls, n: int) -> VertexSet:
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> VertexSet:
        return cls((1 << n) - 1, n)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and (self.bits >> v) & 1 == 1

    def __bool__(self) -> bool:
        return self.bits != 0

    def _check(self, other: VertexSet) -> None:
        if other.n != self.n:
            raise ValueError(f"vertex sets over different ground sets ({self.n} vs {other.n})")

    def __or__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.bits | other.bits, self.n)

    def __and__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.bits & other.bits, self.n)

    def __sub__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.bits & ~other.bits, self.n)

    def issubset(self, other: VertexSet) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def sorted(self) -> list[int]:
        return list(iter_bits(self.bits))

    def __repr__(self) -> str:
        return f"VertexSet({self.sorted()}, n={self.n})"


class Graph:
    """Simple undirected graph; ``adj[v]`` is the neighbour bitset of ``v``."""

    def __init__(self, n: int, adj: Iterable[int]):
        adj = tuple(adj)
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        if len(adj) != n:
            raise ValueError(f"expected {n} adjacency rows, got {len(adj)}")
        for u, row in enumerate(adj):
            if row < 0 or row >> n:
                raise IndexError(f"row {u} has neighbours outside 0..{n - 1}")
            if (row >> u) & 1:
                raise ValueError(f"self-loop at vertex {u}")
            for v in iter_bits(row):
                if not (adj[v] >> u) & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")
        self.n = n
        self.adj = adj

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if (rows[u] >> v) & 1:
                raise ValueError(f"duplicate edge ({u}, {v})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, [0] * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, [full & ~(1 << v) for v in range(n)])

    @property
    def vertices(self) -> VertexSet:
        return VertexSet.full(self.n)

    def vset(self, vertices: Iterable[int]) -> VertexSet:
        return VertexSet.of(self.n, vertices)

    def neighbours(self, v: int) -> VertexSet:
        return VertexSet(self.adj[v], self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return (self.adj[u] >> v) & 1 == 1

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adj[u] >> (u + 1) << (u + 1))]

    @cached_property
    def m(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.adj]

    def regular_degree(self) -> int | None:
        degs = set(self.degrees())
        return degs.pop() if len(degs) == 1 else None

    def induced(self, s: VertexSet) -> tuple[Graph, list[int]]:
        """``G[s]`` relabelled to ``0..|s|-1`` plus the map back to original labels."""
        self._own(s)
        labels = s.sorted()
        index = {v: i for i, v in enumerate(labels)}
        rows = []
        for v in labels:
            rows.append(_bits(index[u] for u in iter_bits(self.adj[v] & s.bits)))
        return Graph(len(labels), rows), labels

    def complement(self) -> Graph:
        full = (1 << self.n) - 1
        return Graph(self.n, [full & ~row & ~(1 << v) for v, row in enumerate(self.adj)])

    def words(self) -> np.ndarray:
        """Adjacency as an ``int64`` array for the kernels."""
        if self.n > MAX_KERNEL_N:
            raise ValueError(f"kernels support at most {MAX_KERNEL_N} vertices, graph has {self.n}")
        return np.array(self.adj, dtype=np.int64)

    def _own(self, s: VertexSet) -> None:
        if s.n != self.n:
            raise IndexError(f"vertex set over n={s.n} used with graph on n={self.n}")

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # edge-list text format: "n m" header, then one "u v" line per edge

    def to_edge_list(self) -> str:
        edges = self.edges()
        lines = [f"{self.n} {len(edges)}"]
        lines.extend(f"{u} {v}" for u, v in edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> Graph:
        tokens = text.split()
        if len(tokens) < 2:
            raise GraphFormatError("missing 'n m' header")
        try:
            values = [int(t) for t in tokens]
        except ValueError as exc:
            raise GraphFormatError(f"non-integer token: {exc}") from None
        n, m = values[0], values[1]
        body = values[2:]
        if len(body) != 2 * m:
            raise GraphFormatError(f"header declares {m} edges but {len(body) / 2:g} follow")
        try:
            return cls.from_edges(n, zip(body[0::2], body[1::2]))
        except (ValueError, IndexError) as exc:
            raise GraphFormatError(str(exc)) from None


def edge_count_within(g: Graph, s: VertexSet) -> int:
    g._own(s)
    bits = s.bits
    return sum((g.adj[v] & bits).bit_count() for v in iter_bits(bits)) // 2


def edge_count_between(g: Graph, s: VertexSet, t: VertexSet) -> int:
    """Edges with one endpoint in ``s`` and the other in ``t``, each counted once.

    For overlapping sets an edge inside ``s & t`` is still counted once, so
    ``edge_count_between(g, s, s) == edge_count_within(g, s)``.
    """
    g._own(s)
    g._own(t)
    ordered = sum((g.adj[u] & t.bits).bit_count() for u in iter_bits(s.bits))
    return ordered - edge_count_within(g, s & t)


def degree_in(g: Graph, v: int, s: VertexSet) -> int:
    g._own(s)
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range for n={g.n}")
    return (g.adj[v] & s.bits).bit_count()


def upset(g: Graph, s: VertexSet, v: int) -> VertexSet:
    """Members of ``s`` with strictly more neighbours in ``s`` than ``v`` has."""
    g._own(s)
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range for n={g.n}")
    return VertexSet(upset_bits(g.adj, s.bits, (g.adj[v] & s.bits).bit_count()), g.n)


def upset_bits(adj: tuple[int, ...], s: int, threshold: int) -> int:
    out = 0
    for u in iter_bits(s):
        if (adj[u] & s).bit_count() > threshold:
            out |= 1 << u
    return out


def edge_density(g: Graph, s: VertexSet) -> Fraction:
    k = len(s)
    if k <= 1:
        return Fraction(0)
    return Fraction(edge_count_within(g, s), k * (k - 1) // 2)
