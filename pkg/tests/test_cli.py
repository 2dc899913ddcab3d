import csv
import json
import subprocess
import sys

import pytest

from graphcontainers import Graph
from graphcontainers.cli import EXIT_CHECK, EXIT_GUARD, EXIT_OK, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def out_root(tmp_path, monkeypatch):
    monkeypatch.setenv("GRAPHCONTAINERS_OUT", str(tmp_path / "runs"))
    return tmp_path


def run(*argv, out=None):
    argv = list(argv) + (["--out", str(out)] if out else [])
    return main(argv)


def results(path):
    return json.loads((path / "results.json").read_text())


class TestGen:
    def test_kdd(self, tmp_path):
        assert run("gen", "kdd", "--copies", "3", "--d", "2", out=tmp_path / "g") == EXIT_OK
        g = Graph.from_edge_list((tmp_path / "g" / "graph.edges").read_text())
        assert (g.n, g.m) == (12, 12)

    def test_gnp_empty(self, tmp_path):
        run("gen", "gnp", "--n", "10", "--p", "0", out=tmp_path / "g")
        assert (tmp_path / "g" / "graph.edges").read_text() == "10 0\n"

    def test_identical_bytes(self, tmp_path):
        args = ("gen", "planted", "--n", "30", "--rho", "1/3", "--p", "1/2", "--sparse-p", "1/10", "--seed", "7")
        run(*args, out=tmp_path / "a")
        run(*args, out=tmp_path / "b")
        for name in ("graph.edges", "sidecar.json", "results.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_default_root_from_env(self, out_root):
        assert run("gen", "gnp", "--n", "5", "--p", "1/2") == EXIT_OK
        dirs = list((out_root / "runs").iterdir())
        assert len(dirs) == 1 and dirs[0].name.startswith("gen-")
        manifest = json.loads((dirs[0] / "manifest.json").read_text())
        assert manifest["subcommand"] == "gen" and manifest["exit_code"] == 0
        assert set(manifest["outputs"]) == {"graph.edges", "sidecar.json", "results.json"}

    def test_missing_parameters(self, tmp_path):
        assert run("gen", "gnp", "--n", "5", out=tmp_path / "g") == EXIT_USAGE

    def test_decimal_rejected(self, tmp_path, capsys):
        assert run("gen", "gnp", "--n", "5", "--p", "0.5", out=tmp_path / "g") == EXIT_USAGE
        assert "decimals are refused" in capsys.readouterr().err


class TestCertify:
    def test_k4_relaxed(self, tmp_path):
        code = run("certify", "complete4", "--rho", "1/2", "--eps", "1/16", "--ell", "1", "--relaxed", out=tmp_path / "c")
        assert code == EXIT_OK
        summary = results(tmp_path / "c")
        assert summary["certificates"] == 4
        assert summary["conclusions_pass"] == {"c1": 4, "c2": 4, "c3": 4}
        certs = json.loads((tmp_path / "c" / "certificates.json").read_text())
        assert {tuple(c["J"]) for c in certs} == {(0,), (1,), (2,), (3,)}

    def test_not_far(self, tmp_path):
        code = run("certify", "empty6", "--rho", "1/2", "--eps", "1/16", "--ell", "1", out=tmp_path / "c")
        assert code == EXIT_OK
        summary = results(tmp_path / "c")
        assert summary["status"] == "not eps-far" and summary["certificates"] == 0
        assert not (tmp_path / "c" / "certificates.json").exists()

    def test_strict_hypothesis_violation(self, tmp_path):
        code = run("certify", "complete4", "--rho", "1/2", "--eps", "1/8", "--ell", "1", out=tmp_path / "c")
        assert code == EXIT_USAGE


class TestTest:
    def test_empty_graph(self, tmp_path):
        code = run("test", "empty12", "--rho", "1/2", "--eps", "1/16", "--s", "6", "--trials", "20", out=tmp_path / "t")
        assert code == EXIT_OK and results(tmp_path / "t")["accept_rate"] == 1.0
        rows = list(csv.DictReader((tmp_path / "t" / "results.csv").open()))
        assert rows[0]["accept_rate"] == "1.0" and rows[0]["s"] == "6"

    def test_complete_graph(self, tmp_path):
        code = run(
            "test", "complete12", "--rho", "1/2", "--eps", "1/16", "--s", "6", "--budget", "0", "--trials", "20",
            out=tmp_path / "t",
        )
        assert code == EXIT_OK and results(tmp_path / "t")["accept_rate"] == 0.0

    def test_zero_trials(self, tmp_path):
        assert run("test", "empty5", "--rho", "1/2", "--eps", "1/16", "--trials", "0", out=tmp_path / "t") == EXIT_USAGE

    def test_threads_identical(self, tmp_path):
        common = ("test", "complete14", "--rho", "1/2", "--eps", "1/16", "--s", "8", "--budget", "5", "--trials", "30")
        run(*common, out=tmp_path / "a")
        run(*common, "--threads", "3", out=tmp_path / "b")
        assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


class TestCount:
    def test_kdd_independent(self, tmp_path, capsys):
        assert run("count", "--family", "kdd", "--copies", "1", "--d", "2", "--independent", out=tmp_path / "k") == 0
        assert results(tmp_path / "k")["count"] == 7
        assert capsys.readouterr().out.strip() == "7"

    def test_empty_density(self, tmp_path):
        assert run("count", "--graph", "empty10", "--density", "1", out=tmp_path / "k") == EXIT_OK
        assert results(tmp_path / "k")["count"] == 1024

    def test_conflicting_thresholds(self, tmp_path):
        assert run("count", "--graph", "empty4", "--density", "1", "--independent", out=tmp_path / "k") == EXIT_USAGE

    def test_guard_refusal(self, tmp_path):
        assert run("count", "--graph", "empty30", "--independent", out=tmp_path / "k") == EXIT_GUARD

    def test_remark52_and_bound(self, tmp_path):
        assert run("count", "--family", "kdd", "--copies", "2", "--d", "2", "--lower-family", "100", out=tmp_path / "r") == 0
        assert results(tmp_path / "r")["pass"]
        assert run("count", "--family", "kdd", "--copies", "2", "--d", "2", "--container-bound", "1", out=tmp_path / "b") == 0
        assert run("count", "--family", "kdd", "--copies", "2", "--d", "2", "--density", "1/4", out=tmp_path / "d") == 0
        assert results(tmp_path / "b")["exact_count"] == results(tmp_path / "d")["count"]

    def test_graph_file(self, tmp_path):
        path = tmp_path / "c4.edges"
        path.write_text("4 4\n0 1\n1 2\n2 3\n0 3\n")
        assert run("count", "--graph", str(path), "--markov", "2", out=tmp_path / "m") == EXIT_OK
        manifest = json.loads((tmp_path / "m" / "manifest.json").read_text())
        assert len(manifest["inputs"]["graph"]["sha256"]) == 64


class TestBound:
    def test_chernoff(self, tmp_path):
        assert run("bound", "chernoff", "--N", "30", "--K", "10", "--n", "12", "--theta", "8", out=tmp_path / "b") == 0
        assert results(tmp_path / "b")["dominates"]

    def test_far_case(self, tmp_path):
        assert run("bound", "far-case", "--rho", "1/2", "--eps", "1/16", "--s", "5000", out=tmp_path / "b") == 0
        data = results(tmp_path / "b")
        assert data["regime_valid"] and data["bound_le_inverse_s"]


def test_rerun_reproduces(tmp_path):
    run("test", "complete10", "--rho", "1/2", "--eps", "1/16", "--s", "6", "--budget", "2", "--trials", "40", "--seed", "5",
        out=tmp_path / "a")
    assert main(["rerun", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "b")]) == EXIT_OK
    for name in ("results.json", "results.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_check_failure_exit_code(tmp_path, monkeypatch):
    from graphcontainers import cli

    monkeypatch.setattr(cli.tester, "chernoff_tail", lambda *a: 0.0)
    assert run("bound", "chernoff", "--N", "10", "--K", "5", "--n", "4", "--theta", "3", out=tmp_path / "b") == EXIT_CHECK


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "graphcontainers", "count", "--graph", "complete5", "--independent", "--out", str(tmp_path / "x")],
        capture_output=True, text=True,
    )
    assert out.returncode == 0 and out.stdout.strip() == "6"
