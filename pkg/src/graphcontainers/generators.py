"""Seeded instance families: G(n, p), planted sparse sets, the adversarial
log-factor instance, disjoint unions of K_{d,d} and the sparse-subset family
on those unions.

Every random family draws one raw PCG64 word per unordered vertex pair, in
row-major order ``(0,1), (0,2), ..., (n-2,n-1)``, from stream 0 of the seed.
Auxiliary choices (planted sets, boosts) use separate streams so that, for
example, a planted instance whose planted probability equals the background
probability is bit-identical to ``gnp`` with the same seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .exact import as_fraction, fraction_str
from .graph import Graph, VertexSet, iter_bits
from .rng import Rng, bernoulli_threshold

_PAIRS, _PLANT, _BOOST = 0, 1, 2


@dataclass(frozen=True)
class PlantedInstance:
    graph: Graph
    planted: VertexSet
    meta: dict = field(default_factory=dict)

    def sidecar(self) -> dict:
        return {**self.meta, "planted": self.planted.sorted()}


def _check_prob(name: str, p: Fraction) -> Fraction:
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def _pair_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _rows_from_pairs(n: int, us: np.ndarray, vs: np.ndarray, keep: np.ndarray) -> list[int]:
    rows = [0] * n
    for u, v in zip(us[keep].tolist(), vs[keep].tolist()):
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return rows


def _pair_draws(n: int, seed: int, probs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One Bernoulli draw per pair; ``probs`` is a Fraction or an object array of them."""
    us, vs = _pair_index(n)
    raw = Rng(seed, _PAIRS).raw(len(us))
    if isinstance(probs, Fraction):
        return us, vs, _below(raw, probs)
    keep = np.zeros(len(us), dtype=bool)
    for p in set(probs.tolist()):
        sel = probs == p
        keep[sel] = _below(raw[sel], p)
    return us, vs, keep


def _below(raw: np.ndarray, p: Fraction) -> np.ndarray:
    if p >= 1:
        return np.ones(raw.shape, dtype=bool)
    return raw < bernoulli_threshold(p)


def gnp(n: int, p, seed: int) -> Graph:
    p = _check_prob("p", p)
    if n < 1:
        raise ValueError("n must be positive")
    us, vs, keep = _pair_draws(n, seed, p)
    return Graph(n, _rows_from_pairs(n, us, vs, keep))


def planted_close_instance(n: int, rho, p, sparse_p, seed: int) -> PlantedInstance:
    """Random graph with a planted ``floor(rho n)``-set whose pairs use ``sparse_p``."""
    rho = as_fraction(rho)
    p = _check_prob("p", p)
    sparse_p = _check_prob("sparse_p", sparse_p)
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if sparse_p > p:
        raise ValueError("sparse_p must not exceed p")
    size = math.floor(rho * n)
    planted = Rng(seed, _PLANT).sample(n, size)
    mark = np.zeros(n, dtype=bool)
    mark[planted] = True
    us, vs = _pair_index(n)
    probs = np.full(len(us), p, dtype=object)
    probs[mark[us] & mark[vs]] = sparse_p
    us, vs, keep = _pair_draws(n, seed, probs)
    graph = Graph(n, _rows_from_pairs(n, us, vs, keep))
    meta = {
        "family": "planted",
        "params": {"n": n, "rho": fraction_str(rho), "p": fraction_str(p), "sparse_p": fraction_str(sparse_p)},
        "seed": seed,
    }
    return PlantedInstance(graph, VertexSet.of(n, planted), meta)


def adversarial_log_instance(n: int, rho, eps, seed: int, j_size: int | None = None) -> PlantedInstance:
    """Independent set ``I`` of size ``floor(rho n / 2)`` planted in ``G(n, 8 eps / rho^2)``,
    with ``J`` inside ``I`` carrying ``G(|J|, eps / rho^2)`` and every ``J`` vertex boosted by
    ``floor(8 eps n / rho^2)`` extra edges so that ``J`` holds the highest degrees.

    Boost edges go to vertices outside ``J``. When the fixed boost leaves some
    ``J`` vertex at or below the top degree outside ``J``, edges are topped up
    towards the lowest-degree outside vertices; ``meta["boost_sufficient"]``
    records whether strict domination was reached.
    """
    rho, eps = as_fraction(rho), as_fraction(eps)
    if not 0 < rho <= 1 or eps <= 0:
        raise ValueError("need 0 < rho <= 1 and eps > 0")
    p_back = 8 * eps / rho**2
    p_inner = eps / rho**2
    if p_back > 1:
        raise ValueError(f"background probability 8*eps/rho^2 = {p_back} exceeds 1")
    i_size = math.floor(rho * n / 2)
    if j_size is None:
        j_size = math.floor(rho * n / 100)
    boost = math.floor(8 * eps * n / rho**2)
    if i_size < 1 or j_size < 1 or j_size > i_size:
        raise ValueError(f"infeasible sizes at n={n}: |I|={i_size}, |J|={j_size}")
    if boost > n - 1:
        raise ValueError(f"degree boost {boost} exceeds n-1")

    plant_rng = Rng(seed, _PLANT)
    indep = plant_rng.sample(n, i_size)
    j_pick = plant_rng.sample(i_size, j_size)
    j_verts = [indep[i] for i in j_pick]
    in_i = np.zeros(n, dtype=bool)
    in_i[indep] = True
    in_j = np.zeros(n, dtype=bool)
    in_j[j_verts] = True

    us, vs = _pair_index(n)
    probs = np.full(len(us), p_back, dtype=object)
    probs[in_i[us] & in_i[vs]] = Fraction(0)
    probs[in_j[us] & in_j[vs]] = p_inner
    us, vs, keep = _pair_draws(n, seed, probs)
    rows = _rows_from_pairs(n, us, vs, keep)

    boost_rng = Rng(seed, _BOOST)
    j_bits = sum(1 << v for v in j_verts)
    for v in j_verts:
        free = [u for u in range(n) if u != v and not (rows[v] >> u) & 1 and not (j_bits >> u) & 1]
        chosen = [free[i] for i in boost_rng.sample(len(free), min(boost, len(free)))]
        for u in chosen:
            rows[v] |= 1 << u
            rows[u] |= 1 << v

    topped_up = 0
    sufficient = True
    outside = [u for u in range(n) if not in_j[u]]
    while outside:
        deg = [r.bit_count() for r in rows]
        weakest = min(j_verts, key=lambda v: (deg[v], v))
        top_out = max(deg[u] for u in outside)
        if deg[weakest] > top_out:
            break
        free = [u for u in outside if not (rows[weakest] >> u) & 1]
        if not free:
            sufficient = False
            break
        low = min(deg[u] for u in free)
        lowest = [u for u in free if deg[u] == low]
        u = lowest[boost_rng.below(len(lowest))]
        rows[weakest] |= 1 << u
        rows[u] |= 1 << weakest
        topped_up += 1

    graph = Graph(n, rows)
    meta = {
        "family": "adversarial",
        "params": {"n": n, "rho": fraction_str(rho), "eps": fraction_str(eps), "j_size": j_size},
        "seed": seed,
        "independent_set": sorted(indep),
        "boost": boost,
        "boost_topped_up": topped_up,
        "boost_sufficient": sufficient,
    }
    return PlantedInstance(graph, VertexSet.of(n, j_verts), meta)


def kdd_union(copies: int, d: int) -> Graph:
    """``copies`` disjoint ``K_{d,d}``; copy ``i`` occupies ``[2di, 2d(i+1))``, first half one side."""
    if copies < 1 or d < 1:
        raise ValueError("copies and d must be positive")
    n = 2 * d * copies
    rows = [0] * n
    side = (1 << d) - 1
    for c in range(copies):
        base = 2 * d * c
        left, right = side << base, side << (base + d)
        for v in range(base, base + d):
            rows[v] = right
        for v in range(base + d, base + 2 * d):
            rows[v] = left
    return Graph(n, rows)


def remark52_budgets(d: int, k) -> tuple[int, int]:
    """(minimum size on the chosen half, maximum size on the other half) per copy.

    "at least d/4" becomes ``ceil(d/4)``; "fewer than d/(32k)" becomes
    ``ceil(d/(32k)) - 1``.
    """
    k = as_fraction(k)
    if k <= 0:
        raise ValueError("k must be positive")
    major = -(-d // 4)
    minor = math.ceil(Fraction(d) / (32 * k)) - 1
    return major, minor


def remark52_copy_options(d: int, k) -> list[int]:
    """Distinct per-copy patterns as bitmasks over ``0..2d-1`` (local labels)."""
    major, minor = remark52_budgets(d, k)
    halves = ((1 << d) - 1, ((1 << d) - 1) << d)
    options = set()
    for chosen, other in (halves, halves[::-1]):
        chosen_v = list(iter_bits(chosen))
        other_v = list(iter_bits(other))
        big = [
            sum(1 << v for v in combo)
            for r in range(major, d + 1)
            for combo in itertools.combinations(chosen_v, r)
        ]
        small = [
            sum(1 << v for v in combo)
            for r in range(0, min(minor, d) + 1)
            for combo in itertools.combinations(other_v, r)
        ]
        options.update(a | b for a in big for b in small)
    return sorted(options)


def remark52_family(d: int, copies: int, k) -> Iterator[VertexSet]:
    """The de-duplicated sparse family on ``kdd_union(copies, d)``.

    Copies are vertex-disjoint, so de-duplicating per copy de-duplicates the
    product.
    """
    options = remark52_copy_options(d, k)
    n = 2 * d * copies
    for combo in itertools.product(options, repeat=copies):
        bits = 0
        for c, pattern in enumerate(combo):
            bits |= pattern << (2 * d * c)
        yield VertexSet(bits, n)
