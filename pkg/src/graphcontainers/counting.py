"""Exact counts of sparse induced subgraphs and the bounds they are compared with."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .containers import GclParams, build_gcl_certificate
from .exact import as_fraction, fraction_str, log2_interval, sqrt_interval
from .generators import kdd_union, remark52_budgets, remark52_copy_options, remark52_family
from .graph import Graph, edge_count_within
from .oracles import (
    DEFAULT_ENUM_GUARD,
    SparsityPredicate,
    check_guard,
    count_sparse,
    enumerate_sparse_subsets,
    is_eps_far,
)


@dataclass
class CountReport:
    descriptor: dict
    threshold: dict
    exact_count: int | None
    bound_terms: dict = field(default_factory=dict)
    comparisons: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.comparisons.values())

    def to_json(self) -> dict:
        return {
            "graph": self.descriptor,
            "threshold": self.threshold,
            "exact_count": self.exact_count,
            "bound_terms": self.bound_terms,
            "comparisons": self.comparisons,
            "pass": self.passed,
        }


def count_sparse_exact(g: Graph, predicate: SparsityPredicate, guard: int = DEFAULT_ENUM_GUARD) -> int:
    return count_sparse(g, predicate, guard)


def count_independent_exact(g: Graph, guard: int = DEFAULT_ENUM_GUARD) -> int:
    """Number of independent sets of ``g``, the empty set included."""
    check_guard(g.n, guard, "independent set counting")
    return int(kernels.count_independent(g.words(), g.n))


def _regular(g: Graph, d: int) -> None:
    actual = g.regular_degree()
    if actual is None or actual != d:
        raise ValueError(f"graph is not {d}-regular")


def markov_density_count(g: Graph, d: int, guard: int = DEFAULT_ENUM_GUARD) -> tuple[int, bool]:
    """Subsets with density below ``4d/n`` and whether they are at least half of all subsets."""
    _regular(g, d)
    count = count_sparse(g, SparsityPredicate.density_lt(Fraction(4 * d, g.n)), guard)
    return count, count >= 2 ** (g.n - 1)


def _binom_prefix(n: int, top: int) -> int:
    return sum(math.comb(n, i) for i in range(0, min(top, n) + 1))


def counting_params(g: Graph, d: int, k, j_extra: int = 1) -> tuple[GclParams, SparsityPredicate]:
    """Farness parameters for counting subsets of density at most ``d/(k n)``.

    ``eps = d j / n^2`` makes ``rho n = n/2 + j`` and ``ell = 2 eps k n / d``.
    """
    k = as_fraction(k)
    n = g.n
    eps = Fraction(d * j_extra, n * n)
    rho = Fraction(1, 2) + eps * n / d
    if rho > 1:
        raise ValueError(f"j_extra = {j_extra} pushes rho above 1")
    ell = max(Fraction(1), 2 * eps * k * n / d)
    return GclParams(eps, rho, ell, relaxed=True), SparsityPredicate.density_le(Fraction(d) / (k * n))


def container_count_bound(
    g: Graph,
    k,
    params: GclParams | None = None,
    c3=1,
    j_extra: int = 1,
    guard: int = DEFAULT_ENUM_GUARD,
) -> CountReport:
    """Covering bound from the certificates of every sparse subset.

    Each nonempty sparse ``J`` gets a certificate ``(F, R)`` with container
    ``C``. Grouping by ``(F, R)`` and letting ``L`` be the largest
    ``|J \\ C|`` in the group, every ``J`` in the group is a subset of ``C``
    plus at most ``L`` outside vertices, so
    ``1 + sum 2^|C| sum_{i <= L} C(n - |C|, i)`` bounds the count (the 1 is
    the empty set).
    """
    d = g.regular_degree()
    if d is None or d < 1:
        raise ValueError("counting bound needs a d-regular graph with d >= 1")
    check_guard(g.n, guard, "container counting")
    k = as_fraction(k)
    default_params, predicate = counting_params(g, d, k, j_extra)
    params = params or default_params
    far, farness = is_eps_far(g, params.rho, params.eps)
    if not far:
        raise ValueError(
            f"graph is not eps-far for eps = {params.eps}, rho = {params.rho} "
            f"(min edges {farness.min_edges} < {params.eps * g.n**2})"
        )
    n = g.n
    groups: dict = {}
    exact = 1  # the empty set
    for j in enumerate_sparse_subsets(g, predicate, guard):
        if not j:
            continue
        exact += 1
        cert = build_gcl_certificate(g, j, params, eps_far=True)
        key = (cert.fingerprint.steps, cert.fingerprint.revision)
        leftover = len(j - cert.container)
        container, worst = groups.get(key, (cert.container, 0))
        groups[key] = (container, max(worst, leftover))

    sound = 1 + sum(2 ** len(c) * _binom_prefix(n - len(c), left) for c, left in groups.values())
    binomial_form = 1 + sum(2 ** len(c) * math.comb(n, left) for c, left in groups.values())
    c3 = as_fraction(c3)
    log_n = log2_interval(n)
    nominal_leftover = math.ceil((c3 * n * log_n**2 / sqrt_interval(params.ell)).hi)
    max_leftover = max((left for _, left in groups.values()), default=0)
    terms = {
        "certificate_bound": sound,
        "binomial_form_bound": binomial_form,
        "fingerprints": len(groups),
        "max_leftover": max_leftover,
        "nominal_leftover": nominal_leftover,
        "nominal_binomial": math.comb(n, nominal_leftover) if nominal_leftover <= n else 0,
        "params": params.to_json() | {"c3": fraction_str(c3), "j_extra": j_extra},
        "min_edges": farness.min_edges,
    }
    comparisons = {
        "exact_le_certificate_bound": exact <= sound,
        "fingerprints_le_sparse_sets": len(groups) <= exact - 1,
    }
    return CountReport({"n": n, "m": g.m, "d": d}, predicate.describe(), exact, terms, comparisons)


def remark52_formula(d: int, copies: int, k) -> int:
    """``2^c (2^d - C(d, ceil(d/4)))^c C(d, b)^c`` with ``b = ceil(d/(32k)) - 1``."""
    major, minor = remark52_budgets(d, k)
    per_copy = 2 * (2**d - math.comb(d, major)) * math.comb(d, max(minor, 0))
    return per_copy**copies


def remark52_count(d: int, copies: int, k, guard: int = DEFAULT_ENUM_GUARD) -> CountReport:
    k = as_fraction(k)
    major, minor = remark52_budgets(d, k)
    if major > d:
        raise ValueError("ceil(d/4) exceeds d")
    n = 2 * d * copies
    g = kdd_union(copies, d)
    predicate = SparsityPredicate.density_le(Fraction(d) / (k * n))
    formula = remark52_formula(d, copies, k)
    family_size = len(remark52_copy_options(d, k)) ** copies
    terms = {
        "formula": formula,
        "family_size": family_size,
        "major_min": major,
        "minor_max": minor,
        "regime": minor <= 0 or copies * d >= 8,
    }
    comparisons = {"family_ge_formula": family_size >= formula}
    exact = None
    if n <= guard:
        exact = count_sparse(g, predicate, guard)
        members_ok = all(predicate.holds(edge_count_within(g, s), len(s)) for s in remark52_family(d, copies, k))
        terms["members_sparse"] = members_ok
        if terms["regime"]:
            comparisons["members_sparse"] = members_ok
            comparisons["exact_ge_family"] = exact >= family_size
            comparisons["formula_le_exact"] = formula <= exact
        terms["independent_sets"] = count_independent_exact(g, guard)
    return CountReport(
        {"family": "kdd", "copies": copies, "d": d, "n": n},
        predicate.describe(),
        exact,
        terms,
        comparisons,
    )
