"""Command-line entry points.

Every run writes one directory holding ``manifest.json``, ``results.json``
(plus ``results.csv`` where a table makes sense) and any certificates. The
directory defaults to ``$GRAPHCONTAINERS_OUT/<subcommand>-<digest>`` where the
digest depends only on the command line, so repeating a command overwrites
the same directory with the same bytes (the manifest's timing aside).

Exit codes: 0 success, 1 runtime error, 2 usage error, 3 guard refusal,
4 a requested soundness check failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, counting, generators, oracles, tester
from .containers import GclParams, HypothesisError, build_gcl_certificate, container_generate
from .exact import as_fraction, fraction_str
from .graph import Graph, GraphFormatError

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_GUARD, EXIT_CHECK = 0, 1, 2, 3, 4
OUT_ENV = "GRAPHCONTAINERS_OUT"


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    """argparse type for exact rationals such as ``1/16`` or ``3``."""
    if not re.fullmatch(r"\s*[+-]?\d+(\s*/\s*\d+)?\s*", text):
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer or p/q rational (decimals are refused)")
    try:
        return as_fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise argparse.ArgumentTypeError(f"{text!r} has a zero denominator") from None


def seed_value(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


_NAMED = re.compile(r"(empty|complete)(\d+)")


def load_graph(spec: str) -> tuple[Graph, dict]:
    """Read an edge-list file; ``emptyN`` / ``completeN`` name built-in graphs when no such file exists."""
    path = Path(spec)
    if path.exists():
        data = path.read_bytes()
        g = Graph.from_edge_list(data.decode())
        return g, {"path": str(path), "sha256": hashlib.sha256(data).hexdigest()}
    named = _NAMED.fullmatch(spec)
    if named:
        kind, n = named.group(1), int(named.group(2))
        g = Graph.empty(n) if kind == "empty" else Graph.complete(n)
        return g, {"builtin": spec}
    raise FileNotFoundError(f"graph file {spec!r} not found")


class Run:
    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.argv = argv
        self.started = time.perf_counter()
        digest = hashlib.sha256("\0".join(argv).encode()).hexdigest()[:12]
        if args.out:
            self.dir = Path(args.out)
        else:
            root = Path(os.environ.get(OUT_ENV, "runs"))
            self.dir = root / f"{args.command}-{digest}"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.inputs: dict = {}
        self.outputs: list[str] = []

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        path.write_text(text)
        self.outputs.append(name)
        return path

    def finish(self, params: dict, status: int) -> None:
        manifest = {
            "subcommand": self.args.command,
            "argv": self.argv,
            "params": params,
            "seed": getattr(self.args, "seed", None),
            "version": __version__,
            "inputs": self.inputs,
            "outputs": sorted(self.outputs),
            "exit_code": status,
            "duration_s": round(time.perf_counter() - self.started, 6),
        }
        (self.dir / "manifest.json").write_text(_dump(manifest))


# subcommands


def cmd_gen(run: Run) -> int:
    a = run.args
    fam = a.family
    if fam == "gnp":
        _need(a, "n", "p")
        g, side = generators.gnp(a.n, a.p, a.seed), {"family": "gnp"}
        side["params"] = {"n": a.n, "p": fraction_str(a.p)}
        side["seed"] = a.seed
    elif fam == "planted":
        _need(a, "n", "rho", "p", "sparse_p")
        inst = generators.planted_close_instance(a.n, a.rho, a.p, a.sparse_p, a.seed)
        g, side = inst.graph, inst.sidecar()
    elif fam == "adversarial":
        _need(a, "n", "rho", "eps")
        inst = generators.adversarial_log_instance(a.n, a.rho, a.eps, a.seed, a.j_size)
        g, side = inst.graph, inst.sidecar()
    else:
        _need(a, "copies", "d")
        g = generators.kdd_union(a.copies, a.d)
        side = {"family": "kdd", "params": {"copies": a.copies, "d": a.d}}
    run.write("graph.edges", g.to_edge_list())
    run.write("sidecar.json", _dump(side))
    run.write("results.json", _dump({"n": g.n, "m": g.m}))
    print(f"{fam}: n={g.n} m={g.m} -> {run.dir / 'graph.edges'}")
    return EXIT_OK


def _need(a, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(a, n) is None]
    if missing:
        raise UsageError(f"{a.family} needs {' '.join(missing)}")


def cmd_certify(run: Run) -> int:
    a = run.args
    g, run.inputs["graph"] = load_graph(a.graph)
    params = GclParams(a.eps, a.rho, a.ell, relaxed=a.relaxed)
    far, farness = oracles.is_eps_far(g, a.rho, a.eps, a.guard)
    summary = {"params": params.to_json(), "farness": farness.to_json(), "eps_far": far}
    if not far:
        summary["status"] = "not eps-far"
        summary["certificates"] = 0
        run.write("results.json", _dump(summary))
        print("not eps-far: no certificates")
        return EXIT_OK
    predicate = oracles.SparsityPredicate.edges_lt_c_sq(params.sparsity_bound())
    certs, failures, mismatches = [], 0, 0
    for j in oracles.enumerate_sparse_subsets(g, predicate, a.enum_guard):
        if not j:
            continue
        cert = build_gcl_certificate(g, j, params, eps_far=True)
        if container_generate(g, cert.fingerprint) != cert.container:
            mismatches += 1
        if cert.strict_hypotheses and not cert.conclusions_pass:
            failures += 1
        certs.append(cert.to_json())
    summary.update(
        {
            "status": "certified",
            "certificates": len(certs),
            "strict_hypotheses": params.strict,
            "conclusions_pass": {k: sum(c["checks"][k]["pass"] for c in certs) for k in ("c1", "c2", "c3")},
            "weak_each_step_pass": sum(c["checks"]["weak_each_step"]["pass"] for c in certs),
            "revisions": sum(c["R"] is not None for c in certs),
            "strict_failures": failures,
            "reconstruction_mismatches": mismatches,
        }
    )
    run.write("certificates.json", _dump(certs))
    run.write("results.json", _dump(summary))
    print(
        f"{len(certs)} certificates; c1/c2/c3 passes {summary['conclusions_pass']}; "
        f"strict={params.strict}; failures={failures}; mismatches={mismatches}"
    )
    return EXIT_CHECK if failures or mismatches else EXIT_OK


def cmd_test(run: Run) -> int:
    a = run.args
    if a.trials < 1:
        raise UsageError("--trials must be at least 1")
    g, run.inputs["graph"] = load_graph(a.graph)
    cfg = tester.TesterConfig(a.rho, a.eps, a.c1, a.c2, a.s, a.budget, a.seed, a.guard)
    if cfg.sample_size > g.n:
        raise UsageError(f"sample size {cfg.sample_size} exceeds n = {g.n}; pass --s")
    stats = tester.monte_carlo(g, cfg, a.trials, threads=a.threads, majority=a.majority)
    row = tester.csv_row(a.label, g, cfg, stats)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=tester.CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)
    run.write("results.csv", buf.getvalue())
    run.write("results.json", _dump(stats.to_json()))
    print(f"accept_rate={stats.rate:.4f} wilson=[{stats.ci_low:.4f}, {stats.ci_high:.4f}] over {stats.trials} trials")
    return EXIT_OK


def cmd_count(run: Run) -> int:
    a = run.args
    if a.graph and a.family:
        raise UsageError("pass either --graph or --family, not both")
    if a.lower_family is not None:
        _need_family(a)
        report = counting.remark52_count(a.d, a.copies, a.lower_family, a.enum_guard)
        return _emit_report(run, report)
    if a.family:
        _need_family(a)
        g = generators.kdd_union(a.copies, a.d)
        run.inputs["graph"] = {"family": "kdd", "copies": a.copies, "d": a.d}
    elif a.graph:
        g, run.inputs["graph"] = load_graph(a.graph)
    else:
        raise UsageError("pass --graph or --family")
    if a.container_bound is not None:
        report = counting.container_count_bound(g, a.container_bound, c3=a.c3, j_extra=a.j_extra, guard=a.enum_guard)
        return _emit_report(run, report)
    if a.markov is not None:
        count, ok = counting.markov_density_count(g, a.markov, a.enum_guard)
        result = {"count": count, "half_of_all": 2 ** (g.n - 1), "pass": ok}
        run.write("results.json", _dump(result))
        print(count)
        return EXIT_OK if ok else EXIT_CHECK
    if a.independent:
        count, pred = counting.count_independent_exact(g, a.enum_guard), oracles.SparsityPredicate.independent()
    else:
        if a.density is not None:
            pred = oracles.SparsityPredicate.density_le(a.density)
        elif a.density_lt is not None:
            pred = oracles.SparsityPredicate.density_lt(a.density_lt)
        else:
            pred = oracles.SparsityPredicate("edges_le", a.edges_le)
        count = counting.count_sparse_exact(g, pred, a.enum_guard)
    run.write("results.json", _dump({"count": count, "threshold": pred.describe(), "n": g.n}))
    print(count)
    return EXIT_OK


def _need_family(a):
    if a.copies is None or a.d is None:
        raise UsageError("this count needs --copies and --d")


def _emit_report(run: Run, report) -> int:
    run.write("results.json", _dump(report.to_json()))
    print(_dump(report.to_json()), end="")
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_bound(run: Run) -> int:
    a = run.args
    if a.kind == "chernoff":
        if None in (a.N, a.K, a.n, a.theta):
            raise UsageError("chernoff needs --N --K --n --theta")
        value = tester.chernoff_tail(a.N, a.K, a.n, a.theta)
        exact = tester.hypergeometric_tail(a.N, a.K, a.n, a.theta)
        result = {
            "bound": value,
            "exact_tail": fraction_str(exact),
            "dominates": Fraction(value) >= exact,
        }
        run.write("results.json", _dump(result))
        print(f"bound={value!r} exact={float(exact)!r}")
        return EXIT_OK if result["dominates"] else EXIT_CHECK
    if a.rho is None or a.eps is None:
        raise UsageError("far-case needs --rho and --eps")
    cfg = tester.TesterConfig(a.rho, a.eps, a.c1, a.c2, a.s)
    report = tester.far_case_bound(cfg, a.c3)
    run.write("results.json", _dump(report.to_json()))
    print(_dump(report.to_json()), end="")
    if report.valid and not report.bound_le_inverse_s:
        return EXIT_CHECK
    return EXIT_OK


def cmd_rerun(args: argparse.Namespace) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    argv = list(manifest["argv"])
    if args.out:
        argv = _strip_out(argv) + ["--out", args.out]
    return main(argv)


def _strip_out(argv: list[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--out":
            skip = True
            continue
        if tok.startswith("--out="):
            continue
        out.append(tok)
    return out


# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphcontainers", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="run directory (default: $%s/<subcommand>-<digest>)" % OUT_ENV)
    common.add_argument("--threads", type=int, default=1, help="worker cap for parallel sections")
    common.add_argument("--guard", type=int, default=oracles.DEFAULT_SEARCH_GUARD, help="max n for pruned exact search")
    common.add_argument("--enum-guard", type=int, default=oracles.DEFAULT_ENUM_GUARD, help="max n for full enumeration")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate an instance")
    g.add_argument("family", choices=["gnp", "planted", "adversarial", "kdd"])
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=rational)
    g.add_argument("--rho", type=rational)
    g.add_argument("--sparse-p", type=rational)
    g.add_argument("--eps", type=rational)
    g.add_argument("--j-size", type=int)
    g.add_argument("--copies", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--seed", type=seed_value, default=0)

    c = sub.add_parser("certify", parents=[common], help="certificates for every sparse J")
    c.add_argument("graph")
    c.add_argument("--rho", type=rational, required=True)
    c.add_argument("--eps", type=rational, required=True)
    c.add_argument("--ell", type=rational, required=True)
    c.add_argument("--relaxed", action="store_true", help="allow parameters outside the strict hypotheses")

    t = sub.add_parser("test", parents=[common], help="Monte-Carlo acceptance of the sampling tester")
    t.add_argument("graph")
    t.add_argument("--rho", type=rational, required=True)
    t.add_argument("--eps", type=rational, required=True)
    t.add_argument("--c1", type=rational, default=Fraction(1))
    t.add_argument("--c2", type=rational, default=Fraction(1))
    t.add_argument("--s", type=int)
    t.add_argument("--budget", type=int)
    t.add_argument("--trials", type=int, default=100)
    t.add_argument("--seed", type=seed_value, default=0)
    t.add_argument("--majority", type=int, help="odd repetitions per trial for majority voting")
    t.add_argument("--label", default="custom", help="family label for the CSV row")

    k = sub.add_parser("count", parents=[common], help="exact sparse-subset counts and bounds")
    k.add_argument("--graph")
    k.add_argument("--family", choices=["kdd"])
    k.add_argument("--copies", type=int)
    k.add_argument("--d", type=int)
    k.add_argument("--c3", type=rational, default=Fraction(1))
    k.add_argument("--j-extra", type=int, default=1, help="rho n = n/2 + j for the container bound")
    mode = k.add_mutually_exclusive_group(required=True)
    mode.add_argument("--independent", action="store_true")
    mode.add_argument("--density", type=rational, help="density at most this value")
    mode.add_argument("--density-lt", type=rational, help="density below this value")
    mode.add_argument("--edges-le", type=rational, help="at most this many edges")
    mode.add_argument("--markov", type=int, metavar="D", help="density below 4D/n on a D-regular graph")
    mode.add_argument("--container-bound", type=rational, metavar="K", help="certificate covering bound at density d/(Kn)")
    mode.add_argument("--lower-family", type=rational, metavar="K", help="K_{d,d} lower-bound family at density d/(Kn)")

    b = sub.add_parser("bound", parents=[common], help="tail and union-bound evaluators")
    b.add_argument("kind", choices=["chernoff", "far-case"])
    b.add_argument("--N", type=int)
    b.add_argument("--K", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--theta", type=rational)
    b.add_argument("--rho", type=rational)
    b.add_argument("--eps", type=rational)
    b.add_argument("--s", type=int)
    b.add_argument("--c1", type=rational, default=Fraction(1))
    b.add_argument("--c2", type=rational, default=Fraction(1))
    b.add_argument("--c3", type=rational, default=Fraction(1))

    r = sub.add_parser("rerun", help="repeat a run from its manifest")
    r.add_argument("manifest")
    r.add_argument("--out")
    return p


COMMANDS = {
    "gen": cmd_gen,
    "certify": cmd_certify,
    "test": cmd_test,
    "count": cmd_count,
    "bound": cmd_bound,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "rerun":
        try:
            return cmd_rerun(args)
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    run = Run(args, argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "out")}
    try:
        status = COMMANDS[args.command](run)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    except oracles.GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        status = EXIT_GUARD
    except (GraphFormatError, HypothesisError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_ERROR
    run.finish(params, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
