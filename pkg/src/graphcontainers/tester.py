"""Sampling tester for large sparse induced subgraphs, plus the tail bounds behind it.

The tester draws ``s`` vertices without replacement and accepts iff some
``floor(rho s)`` of them span at most ``accept_budget`` edges. The inner
search is exact, so the acceptance probability measured by
:func:`monte_carlo` is the tester's true acceptance probability up to
sampling error.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
from scipy.stats import binomtest

from .exact import Interval, as_fraction, exp_neg_upper, fraction_str, log2_interval
from .graph import Graph, VertexSet, edge_count_within
from .oracles import DEFAULT_SEARCH_GUARD, sparsest_subset
from .rng import Rng, derive_seed


def floor_interval(iv: Interval) -> int:
    """``floor`` of the enclosed value; the lower endpoint decides an undecided enclosure."""
    return math.floor(iv.lo)


@dataclass(frozen=True)
class TesterConfig:
    rho: Fraction
    eps: Fraction
    c1: Fraction = Fraction(1)
    c2: Fraction = Fraction(1)
    s: int | None = None
    accept_budget: int | None = None
    seed: int = 0
    guard: int = DEFAULT_SEARCH_GUARD

    def __post_init__(self):
        for name in ("rho", "eps", "c1", "c2"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("constants must be positive")
        if self.s is not None and self.s < 0:
            raise ValueError("sample size must be non-negative")
        if self.accept_budget is not None and self.accept_budget < 0:
            raise ValueError("accept budget must be non-negative")

    @property
    def log_inv_eps(self) -> Interval:
        return log2_interval(1 / self.eps)

    @property
    def sample_size(self) -> int:
        if self.s is not None:
            return self.s
        return floor_interval(self.c2 * self.rho**3 * self.log_inv_eps**5 / self.eps**2)

    @property
    def budget(self) -> int:
        if self.accept_budget is not None:
            return self.accept_budget
        s = self.sample_size
        return floor_interval(2 * self.eps / (self.c1 * self.log_inv_eps**4) * s * s)

    @property
    def target_size(self) -> int:
        return math.floor(self.rho * self.sample_size)

    def trial_seed(self, trial: int) -> int:
        return derive_seed(self.seed, trial)

    def to_json(self) -> dict:
        return {
            "rho": fraction_str(self.rho),
            "eps": fraction_str(self.eps),
            "c1": fraction_str(self.c1),
            "c2": fraction_str(self.c2),
            "s": self.sample_size,
            "accept_budget": self.budget,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class TrialReport:
    accepted: bool
    sample: VertexSet
    witness: VertexSet | None
    edges_found: int | None
    seed: int

    @property
    def verdict(self) -> str:
        return "accept" if self.accepted else "reject"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "sample": self.sample.sorted(),
            "witness": None if self.witness is None else self.witness.sorted(),
            "edges_found": self.edges_found,
            "seed": self.seed,
        }


def sample_vertices(g: Graph, s: int, seed: int) -> VertexSet:
    if not 0 <= s <= g.n:
        raise ValueError(f"sample size {s} outside 0..{g.n}")
    return VertexSet.of(g.n, Rng(seed).sample(g.n, s))


def run_tester(g: Graph, cfg: TesterConfig, trial: int = 0) -> TrialReport:
    s = cfg.sample_size
    if s > g.n:
        raise ValueError(f"sample size {s} exceeds n = {g.n}")
    seed = cfg.trial_seed(trial)
    sample = sample_vertices(g, s, seed)
    sub, labels = g.induced(sample) if s else (None, [])
    k = cfg.target_size
    if sub is None:
        found = VertexSet(0, 0) if k == 0 else None
    else:
        found = sparsest_subset(sub, k, cfg.budget, cfg.guard)
    if found is None:
        return TrialReport(False, sample, None, None, seed)
    witness = VertexSet.of(g.n, (labels[i] for i in found))
    return TrialReport(True, sample, witness, edge_count_within(g, witness), seed)


def run_majority(g: Graph, cfg: TesterConfig, repetitions: int, trial: int = 0) -> bool:
    """Majority vote over an odd number of independent runs."""
    if repetitions < 1 or repetitions % 2 == 0:
        raise ValueError("repetitions must be a positive odd number")
    base = cfg.trial_seed(trial)
    votes = sum(run_tester(g, replace(cfg, seed=base), k).accepted for k in range(repetitions))
    return 2 * votes > repetitions


@dataclass
class AcceptanceStats:
    trials: int
    accepted: int
    ci_low: float
    ci_high: float
    confidence: float
    config: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.accepted / self.trials

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "accepted": self.accepted,
            "accept_rate": self.rate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "confidence": self.confidence,
            "config": self.config,
        }


CSV_COLUMNS = ("family", "n", "rho", "eps", "s", "budget", "trials", "accept_rate", "ci_low", "ci_high")


def csv_row(family: str, g: Graph, cfg: TesterConfig, stats: AcceptanceStats) -> dict:
    return {
        "family": family,
        "n": g.n,
        "rho": fraction_str(cfg.rho),
        "eps": fraction_str(cfg.eps),
        "s": cfg.sample_size,
        "budget": cfg.budget,
        "trials": stats.trials,
        "accept_rate": stats.rate,
        "ci_low": stats.ci_low,
        "ci_high": stats.ci_high,
    }


def monte_carlo(
    g: Graph,
    cfg: TesterConfig,
    trials: int,
    confidence: float = 0.95,
    threads: int = 1,
    majority: int | None = None,
) -> AcceptanceStats:
    """Acceptance rate over ``trials`` seeded runs with a Wilson interval."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if majority is None:
        one = lambda i: run_tester(g, cfg, i).accepted  # noqa: E731
    else:
        one = lambda i: run_majority(g, cfg, majority, i)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            accepted = sum(pool.map(one, range(trials)))
    else:
        accepted = sum(one(i) for i in range(trials))
    ci = binomtest(accepted, trials).proportion_ci(confidence_level=confidence, method="wilson")
    config = cfg.to_json() | ({"majority": majority} if majority else {})
    return AcceptanceStats(trials, accepted, float(ci.low), float(ci.high), confidence, config)


# tail bounds


def chernoff_tail(N: int, K: int, n: int, theta) -> float:
    """Upper bound ``exp(-(theta - mu)^2 / (theta + mu))`` on ``P[X >= theta]``, ``X ~ H(N, K, n)``."""
    if not (0 <= K <= N and 0 <= n <= N):
        raise ValueError("need 0 <= K, n <= N")
    theta = as_fraction(theta)
    mu = Fraction(n * K, N) if N else Fraction(0)
    if theta < mu:
        raise ValueError(f"theta = {theta} is below the mean {mu}")
    if theta + mu == 0:
        return 1.0
    return exp_neg_upper((theta - mu) ** 2 / (theta + mu))


def hypergeometric_tail(N: int, K: int, n: int, theta) -> Fraction:
    """Exact ``P[X >= theta]`` for ``X ~ H(N, K, n)``."""
    theta = as_fraction(theta)
    lo = max(0, math.ceil(theta))
    total = math.comb(N, n)
    hits = sum(math.comb(K, x) * math.comb(N - K, n - x) for x in range(lo, min(K, n) + 1))
    return Fraction(hits, total)


@dataclass
class FarCaseReport:
    s: int
    f_max: mpmath.mpf
    double_sum: mpmath.mpf
    bound: mpmath.mpf
    sample_large_enough: bool
    f_max_squared_le_s: bool
    notes: list[str]

    @property
    def valid(self) -> bool:
        return self.sample_large_enough and self.f_max_squared_le_s

    @property
    def bound_le_inverse_s(self) -> bool:
        return self.bound <= mpmath.mpf(1) / self.s

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "f_max": mpmath.nstr(self.f_max, 20),
            "double_sum": mpmath.nstr(self.double_sum, 20),
            "bound": mpmath.nstr(self.bound, 20),
            "inverse_s": mpmath.nstr(mpmath.mpf(1) / self.s, 20),
            "bound_le_inverse_s": bool(self.bound_le_inverse_s),
            "regime_valid": self.valid,
            "sample_large_enough": self.sample_large_enough,
            "f_max_squared_le_s": self.f_max_squared_le_s,
            "notes": self.notes,
        }


def _mp(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def far_case_bound(cfg: TesterConfig, c3) -> FarCaseReport:
    """Evaluate the union bound for the far case at the configured sample size.

    Reports the double sum over fingerprint vertex counts ``f`` and lengths
    ``k`` of ``exp(-2 k log s)`` together with its closed-form bound
    ``f_max^2 exp(-2 log s)``, where ``f_max = c3 rho^2 log^2(1/eps)/eps + 1``.
    """
    c3 = as_fraction(c3)
    if c3 <= 0:
        raise ValueError("c3 must be positive")
    s = cfg.sample_size
    if s < 2:
        raise ValueError("far-case bound needs s >= 2")
    rho, eps = cfg.rho, cfg.eps
    with mpmath.workdps(50):
        log_inv = mpmath.log(_mp(1 / eps), 2)
        log_s = mpmath.log(s, 2)
        f_max = _mp(c3 * rho**2) * log_inv**2 / _mp(eps) + 1
        top = int(mpmath.floor(f_max))
        per_k = [mpmath.exp(-2 * k * log_s) for k in range(top + 1)]
        double_sum = mpmath.fsum(per_k[k] for f in range(1, top + 1) for k in range(f, top + 1))
        bound = f_max**2 * mpmath.exp(-2 * log_s)
        large = _mp(eps / (4 * c3 * rho**2)) / log_inv**2 * _mp(rho * s) >= 1
        square_ok = f_max**2 <= s
    notes = [
        "fingerprints with |F_vert| = f and |F| = k are counted as C(n, f) exp(2 k log k), "
        "the bound used before the final simplification; the tuple space of (F, R) is not enumerated"
    ]
    if not large:
        notes.append("regime invalid: sample too small for the Chernoff step")
    if not square_ok:
        notes.append("regime invalid: f_max^2 > s")
    return FarCaseReport(s, f_max, double_sum, bound, bool(large), bool(square_ok), notes)
