"""Fingerprints and containers for sparse induced subgraphs.

The greedy fingerprint procedure repeatedly picks a vertex of ``J`` and an
operation (drop its neighbours, or drop every container vertex of higher
degree) that maximises the removal ratio, until the container has few edges.
Replaying the recorded sequence reconstructs the container without knowing
``J``. A certificate bundles the fingerprint, its optional revision and
exact checks of the three container guarantees.

Ratios carry ``sqrt(ell)`` in their denominators, so they are held as
:class:`~graphcontainers.exact.Root` values and compared through their
squares. Bounds with ``log2`` are evaluated on intervals and only reported as
holding when they hold on the whole enclosure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import (
    Interval,
    Root,
    as_fraction,
    fraction_str,
    holds_le,
    log2_interval,
    sqrt_interval,
)
from .graph import Graph, VertexSet, edge_count_between, edge_count_within, iter_bits, upset_bits


class HypothesisError(ValueError):
    """An input violates a hypothesis that strict mode enforces."""


class Direction(enum.Enum):
    DOWN = "down"  # remove the neighbours of v
    UP = "up"  # remove container vertices of higher degree than v

    @property
    def arrow(self) -> str:
        return "↓" if self is Direction.DOWN else "↑"


@dataclass(frozen=True)
class GclParams:
    eps: Fraction
    rho: Fraction
    ell: Fraction
    relaxed: bool = False

    def __post_init__(self):
        for name in ("eps", "rho", "ell"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if self.ell < 1:
            raise ValueError("ell must be at least 1")
        if not self.relaxed and not self.eps < self.rho**2 / 2:
            raise HypothesisError(f"eps = {self.eps} is not below rho^2/2 = {self.rho**2 / 2}; use relaxed mode")

    @property
    def log_term(self) -> Interval:
        """``log2(8 rho / eps)``."""
        return log2_interval(8 * self.rho / self.eps)

    @property
    def sqrt_ell(self) -> Interval:
        return sqrt_interval(self.ell)

    def tau_squared(self, j_size: int) -> Fraction:
        """Square of the ratio floor ``eps |J| / (sqrt(ell) rho^2)``."""
        return self.eps**2 * j_size**2 / (self.ell * self.rho**4)

    def sparsity_bound(self) -> Fraction:
        """``c`` in the hypothesis ``|E(J)| < c |J|^2``."""
        return self.eps / (self.ell * self.rho**2)

    def j_is_sparse(self, g: Graph, j: VertexSet) -> bool:
        return edge_count_within(g, j) < self.sparsity_bound() * len(j) ** 2

    def ell_meets_strict(self) -> bool:
        """``ell >= 1024 log^4(1/eps)`` on the whole enclosure (false when eps >= 1)."""
        if self.eps >= 1:
            return False
        return holds_le(1024 * log2_interval(1 / self.eps) ** 4, self.ell)[0]

    @property
    def strict(self) -> bool:
        return self.eps < self.rho**2 / 2 and self.ell_meets_strict()

    def to_json(self) -> dict:
        return {
            "eps": fraction_str(self.eps),
            "rho": fraction_str(self.rho),
            "ell": fraction_str(self.ell),
            "relaxed": self.relaxed,
            "strict": self.strict,
        }


@dataclass(frozen=True)
class Fingerprint:
    steps: tuple[tuple[int, Direction], ...] = ()
    revision: tuple[int, int] | None = None

    def vertices(self) -> set[int]:
        out = {v for v, _ in self.steps}
        if self.revision is not None:
            out.add(self.revision[1])
        return out

    def to_json(self) -> dict:
        return {
            "F": [[v, d.value] for v, d in self.steps],
            "R": None if self.revision is None else list(self.revision),
        }

    @classmethod
    def from_json(cls, data: dict) -> Fingerprint:
        steps = tuple((int(v), Direction(d)) for v, d in data["F"])
        rev = data.get("R")
        return cls(steps, None if rev is None else (int(rev[0]), int(rev[1])))


@dataclass(frozen=True)
class MrrResult:
    value: Root
    vertex: int
    direction: Direction
    numerator: int
    denominator: int  # before taking the max with the floor


@dataclass(frozen=True)
class StepRecord:
    vertex: int
    direction: Direction
    ratio: Root
    numerator: int
    denominator: int
    removed: int  # |C_{t-1}| - |C_t|
    removed_j: int  # |J & C_{t-1}| - |J & C_t|


@dataclass
class ContainerTrace:
    n: int
    containers: list[int] = field(default_factory=list)
    steps: list[StepRecord] = field(default_factory=list)

    def container(self, t: int) -> VertexSet:
        return VertexSet(self.containers[t], self.n)

    @property
    def final(self) -> VertexSet:
        return self.container(len(self.containers) - 1)

    def fingerprint(self) -> Fingerprint:
        return Fingerprint(tuple((s.vertex, s.direction) for s in self.steps))


def _check_j(g: Graph, j: VertexSet) -> None:
    if j.n != g.n:
        raise IndexError(f"J is over n={j.n}, graph has n={g.n}")
    if not j:
        raise ValueError("J must be nonempty")


def _mrr_bits(adj: tuple[int, ...], j: int, j_size: int, c: int, tau_sq: Fraction) -> MrrResult:
    deg_c = {u: (adj[u] & c).bit_count() for u in iter_bits(c)}
    best = None
    for v in iter_bits(j):
        dv = (adj[v] & c).bit_count()
        candidates = (
            (Direction.DOWN, dv, (adj[v] & j).bit_count()),
            (Direction.UP, *_up_counts(deg_c, dv, j)),
        )
        for direction, num, den in candidates:
            ratio = Root(Fraction(num * num) / max(Fraction(den * den), tau_sq))
            if best is None or ratio > best.value:
                best = MrrResult(ratio, v, direction, num, den)
    return best


def _up_counts(deg_c: dict[int, int], dv: int, j: int) -> tuple[int, int]:
    size = inside = 0
    for u, du in deg_c.items():
        if du > dv:
            size += 1
            inside += (j >> u) & 1
    return size, inside


def mrr(g: Graph, j: VertexSet, c: VertexSet, params: GclParams) -> MrrResult:
    """Maximum removal ratio of ``J`` against container ``C``.

    Ties go to the smaller vertex, and at equal ratio ``DOWN`` beats ``UP``.
    """
    _check_j(g, j)
    g._own(c)
    return _mrr_bits(g.adj, j.bits, len(j), c.bits, params.tau_squared(len(j)))


def _apply(adj: tuple[int, ...], c: int, v: int, direction: Direction) -> int:
    if direction is Direction.DOWN:
        return c & ~adj[v]
    return c & ~upset_bits(adj, c, (adj[v] & c).bit_count())


def fingerprint_generate(g: Graph, j: VertexSet, params: GclParams) -> tuple[Fingerprint, ContainerTrace]:
    _check_j(g, j)
    if not params.j_is_sparse(g, j) and not params.relaxed:
        raise HypothesisError(
            f"G[J] has {edge_count_within(g, j)} edges, not fewer than "
            f"{params.sparsity_bound()}*|J|^2; use relaxed mode"
        )
    adj = g.adj
    limit = params.eps * g.n * g.n / 4
    tau_sq = params.tau_squared(len(j))
    c = (1 << g.n) - 1
    trace = ContainerTrace(g.n, [c])
    while edge_count_within(g, VertexSet(c, g.n)) > limit:
        if len(trace.steps) >= g.n:
            raise RuntimeError("fingerprint generation did not terminate within n steps")
        best = _mrr_bits(adj, j.bits, len(j), c, tau_sq)
        nxt = _apply(adj, c, best.vertex, best.direction)
        # a container with an edge always admits a step removing something
        assert nxt != c, "step removed no vertex"
        trace.steps.append(
            StepRecord(
                best.vertex,
                best.direction,
                best.value,
                best.numerator,
                best.denominator,
                (c ^ nxt).bit_count(),
                ((c ^ nxt) & j.bits).bit_count(),
            )
        )
        trace.containers.append(nxt)
        c = nxt
    return trace.fingerprint(), trace


def replay(g: Graph, steps) -> list[int]:
    """Containers ``C_0..C_|F|`` as bitsets for the step sequence."""
    c = (1 << g.n) - 1
    out = [c]
    for v, direction in steps:
        if not 0 <= v < g.n:
            raise IndexError(f"fingerprint vertex {v} out of range for n={g.n}")
        c = _apply(g.adj, c, v, Direction(direction))
        out.append(c)
    return out


def container_generate(g: Graph, f: Fingerprint) -> VertexSet:
    chain = replay(g, f.steps)
    last = chain[-1]
    if f.revision is not None:
        i, u = f.revision
        if not 0 <= i < len(chain):
            raise IndexError(f"revision index {i} outside 0..{len(chain) - 1}")
        if not 0 <= u < g.n:
            raise IndexError(f"revision vertex {u} out of range for n={g.n}")
        ci = chain[i]
        last &= ~upset_bits(g.adj, ci, (g.adj[u] & ci).bit_count())
    return VertexSet(last, g.n)


# degree threshold


@dataclass(frozen=True)
class DegreeThreshold:
    d: Fraction
    witnesses: VertexSet
    source: str  # "ladder" or "scan"


def degree_threshold_counts(degs: list[int], size_u: int, size_w: int, m: int) -> tuple[Fraction, str] | None:
    """Choose ``d`` from the multiset of ``|N(x) & W|`` over ``x`` in ``U``.

    Tries the halving ladder ``|W|/2^k`` (clamped to the lower end
    ``m/(2|U|)``) first, then scans every integer interval ``[a, a+1)`` for
    the smallest admissible ``d``. Returns None only if no ``d`` in the range
    meets the count bound.
    """
    lo = Fraction(m, 2 * size_u)
    hi = Fraction(size_w)
    log_iv = log2_interval(Fraction(2 * size_u * size_w, m))

    def witnesses_above(d: Fraction) -> int:
        return sum(1 for x in degs if x > d)

    def ok(d: Fraction) -> bool:
        return holds_le(Interval.point(m), 4 * d * witnesses_above(d) * log_iv)[0]

    k = 0
    while True:
        d = max(hi / 2**k, lo)
        if ok(d):
            return d, "ladder"
        if d == lo:
            break
        k += 1

    a = int(lo)
    while a < size_w:
        count = sum(1 for x in degs if x > a)
        if count == 0:
            break
        need = Fraction(m) / (4 * count * log_iv.lo)
        d = max(Fraction(a), lo, need)
        if d < a + 1 and d <= hi and ok(d):
            return d, "scan"
        a += 1
    return None


def degree_threshold(g: Graph, u: VertexSet, w: VertexSet, m: int) -> DegreeThreshold | None:
    """Some ``m/(2|U|) <= d <= |W|`` with many vertices of ``U`` having more than ``d`` neighbours in ``W``.

    "Many" means at least ``m / (4 d log2(2|U||W|/m))``.
    """
    g._own(u)
    g._own(w)
    if m < 1:
        raise ValueError("m must be at least 1")
    available = edge_count_between(g, u, w)
    if m > available:
        raise ValueError(f"m = {m} exceeds |E(U, W)| = {available}")
    degs = [(g.adj[x] & w.bits).bit_count() for x in u]
    found = degree_threshold_counts(degs, len(u), len(w), m)
    if found is None:
        return None
    d, source = found
    bits = 0
    for x, dx in zip(u, degs):
        if dx > d:
            bits |= 1 << x
    return DegreeThreshold(d, VertexSet(bits, g.n), source)


# weak containment


@dataclass
class StepCheck:
    step: int
    passed: bool
    margin: Fraction


@dataclass
class WeakContainmentReport:
    hypotheses_met: bool
    unmet: list[str]
    steps: list[StepCheck]
    final_containment: tuple[bool, Fraction]
    length: tuple[bool, Fraction]

    @property
    def each_step(self) -> tuple[bool, Fraction | None]:
        if not self.steps:
            return True, None
        return all(s.passed for s in self.steps), min(s.margin for s in self.steps)

    @property
    def passed(self) -> bool:
        return self.each_step[0] and self.final_containment[0] and self.length[0]

    def to_json(self) -> dict:
        ok, margin = self.each_step
        return {
            "hypotheses_met": self.hypotheses_met,
            "unmet": self.unmet,
            "each_step": _check_json(ok, margin),
            "steps": [_check_json(s.passed, s.margin) | {"t": s.step} for s in self.steps],
            "final_containment": _check_json(*self.final_containment),
            "length": _check_json(*self.length),
        }


def _check_json(passed: bool, margin: Fraction | None) -> dict:
    return {"pass": bool(passed), "margin": None if margin is None else fraction_str(margin)}


def verify_weak_containment(
    trace: ContainerTrace, params: GclParams, j: VertexSet, eps_far: bool | None = None
) -> WeakContainmentReport:
    """Check the per-step progress bound and the two final bounds of the greedy procedure.

    ``eps_far`` is the caller's farness verdict; None means unknown and is
    reported as an unmet hypothesis.
    """
    unmet = []
    if not params.eps <= params.rho**2 / 2:
        unmet.append("eps <= rho^2/2")
    if params.ell < 256:
        unmet.append("ell >= 256")
    if eps_far is not True:
        unmet.append("eps-far")
    n = trace.n
    rho_n = params.rho * n
    log_iv = params.log_term
    sqrt_ell = params.sqrt_ell
    js = len(j)
    checks = []
    for t, step in enumerate(trace.steps, start=1):
        before = len(trace.container(t - 1))
        rhs = sqrt_ell * max(Fraction(before), rho_n) / (16 * log_iv * js)
        ok, margin = holds_le(rhs, step.ratio.interval())
        checks.append(StepCheck(t, ok, margin))
    kept = len(trace.final & j)
    final = holds_le((1 - 16 * log_iv**2 / sqrt_ell) * js, Interval.point(kept))
    length = holds_le(Interval.point(len(trace.steps)), 16 * params.rho**2 * log_iv**2 / params.eps)
    return WeakContainmentReport(not unmet, unmet, checks, final, length)


# revision and certificates


@dataclass(frozen=True)
class Revision:
    index: int
    vertex: int
    gamma: Fraction
    cost_margin: Fraction
    gain_margin: Fraction
    source: str  # "worst-step" or "scan"


def _revision_ok(
    g: Graph, j: VertexSet, d_bits: int, c_final: int, v: int, params: GclParams, r: Root
) -> tuple[bool, Fraction, Fraction, Fraction]:
    rho_n = params.rho * g.n
    up = upset_bits(g.adj, d_bits, (g.adj[v] & d_bits).bit_count())
    gamma = 1 - Fraction((c_final & ~up).bit_count()) / rho_n
    log_iv = params.log_term
    gain_ok, gain_margin = holds_le(params.sqrt_ell / (16 * r.interval() * log_iv), Interval.point(gamma))
    cost = (up & j.bits).bit_count()
    cost_ok, cost_margin = holds_le(Interval.point(cost), 16 * gamma * log_iv**2 / params.sqrt_ell * len(j))
    return gain_ok and cost_ok, gamma, gain_margin, cost_margin


def find_revision(
    g: Graph,
    j: VertexSet,
    trace: ContainerTrace,
    c_final: VertexSet,
    params: GclParams,
    r: Root,
    worst_step: int | None = None,
    t_star: int | None = None,
) -> Revision | None:
    """A trace index ``i`` and ``v`` in ``J`` whose revision meets both revision bounds.

    Candidates at the worst-ratio step are tried first; then every
    ``i < t_star`` (all indices when ``t_star`` is None). Among admissible
    pairs the largest ``gamma`` wins, ties to the smaller index and vertex.
    """
    _check_j(g, j)
    if len(trace.containers) != len(trace.steps) + 1:
        raise ValueError("inconsistent trace: container count must be step count + 1")
    if not c_final.issubset(trace.final):
        raise ValueError("inconsistent trace: final container is not inside the last trace container")
    last = len(trace.containers) - 1
    top = last + 1 if t_star is None else min(t_star, last + 1)

    def best_at(indices, source) -> Revision | None:
        best = None
        for i in indices:
            d_bits = trace.containers[i]
            for v in j:
                ok, gamma, gain_m, cost_m = _revision_ok(g, j, d_bits, c_final.bits, v, params, r)
                if ok and (best is None or gamma > best.gamma):
                    best = Revision(i, v, gamma, cost_m, gain_m, source)
        return best

    if worst_step is not None and 1 <= worst_step <= len(trace.steps):
        found = best_at([worst_step - 1], "worst-step")
        if found is not None:
            return found
    return best_at(range(0, top), "scan")


@dataclass
class GclCertificate:
    j: VertexSet
    fingerprint: Fingerprint
    container: VertexSet
    alpha: Fraction
    r: Root | None
    t_star: int | None
    worst_step: int | None
    checks: dict
    strict_hypotheses: bool
    notes: list[str] = field(default_factory=list)
    revision: Revision | None = None
    trace: ContainerTrace | None = None
    weak: WeakContainmentReport | None = None

    @property
    def conclusions_pass(self) -> bool:
        return all(self.checks[k]["pass"] for k in ("c1", "c2", "c3"))

    def to_json(self) -> dict:
        out = {"J": self.j.sorted()}
        out.update(self.fingerprint.to_json())
        out.update(
            {
                "container": self.container.sorted(),
                "alpha": fraction_str(self.alpha),
                "r": None if self.r is None else str(self.r),
                "r_squared": None if self.r is None else fraction_str(self.r.square),
                "t_star": self.t_star,
                "checks": self.checks,
                "strict_hypotheses": self.strict_hypotheses,
                "notes": self.notes,
            }
        )
        return out


def _worst_ratio(trace: ContainerTrace, rho_n: Fraction, alpha: Fraction, js: int) -> tuple[int | None, Root | None, int | None]:
    """``t*`` plus the step ``t <= t*`` minimising ``MRR_t |J| / (|C_{t-1}| - (1-2 alpha) rho n)``."""
    t_star = next((t for t, c in enumerate(trace.containers) if c.bit_count() <= rho_n), None)
    if t_star is None:
        return None, None, None
    shift = (1 - 2 * alpha) * rho_n
    best_t, best_r = None, None
    for t in range(1, t_star + 1):
        gap = trace.containers[t - 1].bit_count() - shift
        if gap <= 0:
            continue
        r_t = trace.steps[t - 1].ratio.scaled(Fraction(js) / gap)
        if best_r is None or r_t < best_r:
            best_t, best_r = t, r_t
    return t_star, best_r, best_t


def _interval_gt(x: Fraction, iv: Interval) -> bool:
    # undecided enclosures count as "not greater", which sends the case to the revision search
    return x > iv.hi


def conclusion_checks(
    g: Graph, j: VertexSet, f: Fingerprint, container: VertexSet, params: GclParams
) -> tuple[Fraction, dict]:
    n = g.n
    rho_n = params.rho * n
    alpha = 1 - len(container) / rho_n
    log_iv = params.log_term
    c1 = holds_le(Interval.point(len(container)), (1 - params.eps / (2 * params.rho**2)) * rho_n)
    c2 = holds_le(Interval.point(len(f.steps)), 32 * alpha * params.rho**2 * log_iv**2 / params.eps)
    c3 = holds_le((1 - 32 * alpha * log_iv**2 / params.sqrt_ell) * len(j), Interval.point(len(j & container)))
    return alpha, {"c1": _check_json(*c1), "c2": _check_json(*c2), "c3": _check_json(*c3)}


def build_gcl_certificate(
    g: Graph, j: VertexSet, params: GclParams, eps_far: bool | None = None
) -> GclCertificate:
    """Fingerprint, optional revision and exact checks for one sparse ``J``.

    ``eps_far`` is the oracle's verdict on ``g``; strict mode requires it to
    be True. Relaxed mode runs regardless and records what did not hold.
    """
    _check_j(g, j)
    notes = []
    sparse = params.j_is_sparse(g, j)
    if not params.relaxed:
        if eps_far is not True:
            raise HypothesisError("strict mode needs a certified eps-far graph")
        if not sparse:
            raise HypothesisError("G[J] is not sparse enough for these parameters")
    if not sparse:
        notes.append("J not sparse")
    if eps_far is not True:
        notes.append("eps-far not certified" if eps_far is None else "not eps-far")
    strict = params.strict and sparse and eps_far is True

    f, trace = fingerprint_generate(g, j, params)
    weak = verify_weak_containment(trace, params, j, eps_far)
    rho_n = params.rho * g.n
    c_final = trace.final
    alpha = 1 - len(c_final) / rho_n
    t_star = r = worst = None
    revision = None
    container = c_final
    if alpha >= Fraction(1, 2):
        notes.append("alpha >= 1/2, no revision")
    elif alpha <= 0:
        notes.append("final container not below rho n, no revision")
    else:
        t_star, r, worst = _worst_ratio(trace, rho_n, alpha, len(j))
        if r is None:
            notes.append("no step with t <= t*, no revision")
        elif _interval_gt(alpha, params.sqrt_ell / (32 * r.interval() * params.log_term)):
            notes.append("alpha above revision threshold, no revision")
        else:
            revision = find_revision(g, j, trace, c_final, params, r, worst, t_star)
            if revision is None:
                unmet = []
                if edge_count_within(g, c_final) > params.eps * g.n**2 / 4:
                    unmet.append("|E(C)| <= eps n^2/4")
                if worst is None or trace.containers[worst - 1].bit_count() < rho_n:
                    unmet.append("|D| >= rho n")
                notes.append("revision not found" + (f" (unmet: {', '.join(unmet)})" if unmet else ""))
            else:
                f = Fingerprint(f.steps, (revision.index, revision.vertex))
                container = container_generate(g, f)
    alpha, checks = conclusion_checks(g, j, f, container, params)
    ok, margin = weak.each_step
    checks["weak_each_step"] = _check_json(ok, margin)
    return GclCertificate(
        j, f, container, alpha, r, t_star, worst, checks, strict, notes, revision, trace, weak
    )


def check_margin(cert: GclCertificate, key: str) -> Fraction | None:
    m = cert.checks[key]["margin"]
    return None if m is None else Fraction(m)


__all__ = [
    "Direction",
    "GclParams",
    "Fingerprint",
    "MrrResult",
    "StepRecord",
    "ContainerTrace",
    "DegreeThreshold",
    "WeakContainmentReport",
    "Revision",
    "GclCertificate",
    "HypothesisError",
    "mrr",
    "fingerprint_generate",
    "replay",
    "container_generate",
    "degree_threshold",
    "degree_threshold_counts",
    "verify_weak_containment",
    "find_revision",
    "build_gcl_certificate",
    "conclusion_checks",
]
