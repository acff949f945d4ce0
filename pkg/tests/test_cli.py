"""
Tests for the digft command line.
"""

import json

import numpy as np
import pytest

from digft import load_basis, load_graph
from digft.cli import EXIT_INPUT, EXIT_INVALID, EXIT_OK, EXIT_USAGE, build_parser, main


@pytest.fixture
def edge_graph(tmp_path):
    path = tmp_path / "g.tsv"
    path.write_text("#n=2\n0 1 2.0 0.0\n")
    return path


@pytest.fixture
def signal_31(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("3\n1\n")
    return path


@pytest.fixture
def triangle(tmp_path):
    """Undirected weighted triangle."""
    path = tmp_path / "tri.tsv"
    path.write_text("#n=3\n0 1 1.0\n1 0 1.0\n1 2 2.0\n2 1 2.0\n0 2 0.5\n2 0 0.5\n")
    return path


@pytest.fixture
def signed_graph(tmp_path):
    path = tmp_path / "signed.tsv"
    path.write_text("#n=4\n0 1 1.0\n1 2 -1.0\n2 3 1.0\n3 0 -1.0\n0 2 1.0\n")
    return path


@pytest.fixture
def series_csv(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("t,v0,v1,v2,v3\n0,1,0,0,0\n1,0,1,0,0\n2,0.5,0.5,-1,0\n")
    return path


class TestParser:
    """Test argument handling and exit codes."""

    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_missing_command(self):
        assert main([]) == EXIT_USAGE

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        assert "digft" in capsys.readouterr().out

    def test_subcommands_registered(self):
        parser = build_parser()
        for command in ("gen", "variation", "basis", "transform", "spectra",
                        "experiment-discordance", "experiment-compare", "validate", "case-study"):
            with pytest.raises(SystemExit) as exc:
                parser.parse_args([command, "--help"])
            assert exc.value.code == 0

    @pytest.mark.parametrize("command", ["experiment-discordance", "experiment-compare"])
    def test_jobs_after_subcommand(self, command):
        parser = build_parser()
        assert parser.parse_args([command, "--jobs", "3", "--out", "o"]).jobs == 3
        assert parser.parse_args(["--jobs", "2", command, "--out", "o"]).jobs == 2
        assert parser.parse_args([command, "--out", "o"]).jobs is None

    def test_transform_needs_one_source(self, tmp_path):
        argv = ["transform", "--basis", str(tmp_path), "--series", "a.csv", "--signal", "b.csv", "--out", "o.csv"]
        assert main(argv) == EXIT_USAGE


class TestVariation:
    """Test the variation subcommand."""

    def test_weighted_edge(self, edge_graph, signal_31, capsys):
        code = main(["variation", "--graph", str(edge_graph), "--signal", str(signal_31), "--kind", "dv"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == "8.0"

    def test_tv_on_directed_graph(self, edge_graph, signal_31, capsys):
        code = main(["variation", "--graph", str(edge_graph), "--signal", str(signal_31), "--kind", "tv"])
        assert code == EXIT_INPUT
        assert "digft: error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, signal_31):
        code = main(["variation", "--graph", str(tmp_path / "nope.tsv"), "--signal", str(signal_31), "--kind", "dv"])
        assert code == EXIT_INPUT

    def test_signal_length_mismatch(self, triangle, signal_31):
        code = main(["variation", "--graph", str(triangle), "--signal", str(signal_31), "--kind", "idv"])
        assert code == EXIT_INPUT


class TestGen:
    """Test graph generation."""

    def test_ring_with_derived(self, tmp_path):
        out = tmp_path / "ring.tsv"
        code = main(["gen", "--class", "ring", "--seed", "1", "--out", str(out), "--emit-derived"])
        assert code == EXIT_OK
        g = load_graph(out)
        assert g.edge_count == 16
        for suffix in ("_i", "_p"):
            derived = load_graph(tmp_path / f"ring{suffix}.tsv")
            assert np.array_equal(derived.pattern, g.pattern)
        manifest = json.loads((tmp_path / "ring.tsv.manifest.json").read_text())
        assert manifest["command"] == "gen"
        assert manifest["seed"] == 1

    def test_same_seed_same_graph(self, tmp_path):
        for name in ("a.tsv", "b.tsv"):
            assert main(["gen", "--class", "er", "--seed", "9", "--out", str(tmp_path / name)]) == EXIT_OK
        assert (tmp_path / "a.tsv").read_text() == (tmp_path / "b.tsv").read_text()

    def test_invalid_ring_degree(self, tmp_path):
        code = main(["gen", "--class", "ring", "--seed", "1", "--degree", "3", "--out", str(tmp_path / "r.tsv")])
        assert code == EXIT_USAGE


class TestBasisAndTransforms:
    """Test basis, transform and spectra."""

    def test_greedy_on_undirected(self, tmp_path, triangle):
        out = tmp_path / "basis"
        code = main(["basis", "--graph", str(triangle), "--kind", "idv", "--method", "greedy", "--out", str(out)])
        assert code == EXIT_OK
        basis = load_basis(out)
        lap = np.array([[1.5, -1.0, -0.5], [-1.0, 3.0, -2.0], [-0.5, -2.0, 2.5]])
        assert np.allclose(basis.frequencies, np.linalg.eigvalsh(lap), atol=1e-9)
        manifest = json.loads((out / "manifest.json").read_text())
        assert str(triangle) in manifest["inputs"]

    def test_feasible(self, tmp_path, signed_graph):
        out = tmp_path / "basis"
        argv = ["basis", "--graph", str(signed_graph), "--kind", "idv", "--method", "feasible",
                "--restarts", "2", "--max-iters", "100", "--out", str(out)]
        assert main(argv) == EXIT_OK
        basis = load_basis(out)
        assert basis.orthonormality_error() <= 1e-8
        assert len(basis.diagnostics.final_objective) == 2

    def test_bad_phase_grid(self, tmp_path, signed_graph):
        argv = ["basis", "--graph", str(signed_graph), "--kind", "cdv", "--method", "greedy",
                "--K", "1", "--out", str(tmp_path / "b")]
        assert main(argv) == EXIT_USAGE

    def test_transform_signal_and_series(self, tmp_path, signed_graph, series_csv):
        basis_dir = tmp_path / "basis"
        main(["basis", "--graph", str(signed_graph), "--kind", "idv", "--method", "greedy", "--out", str(basis_dir)])
        signal = tmp_path / "x.csv"
        signal.write_text("1\n0\n0\n0\n")

        spectrum = tmp_path / "spectrum.csv"
        assert main(["transform", "--basis", str(basis_dir), "--signal", str(signal), "--out", str(spectrum)]) == EXIT_OK
        assert spectrum.read_text().startswith("k,frequency,value")
        assert (tmp_path / "spectrum.csv.manifest.json").exists()

        coeffs = tmp_path / "coeffs.csv"
        assert main(["transform", "--basis", str(basis_dir), "--series", str(series_csv), "--out", str(coeffs)]) == EXIT_OK
        assert len(coeffs.read_text().splitlines()) == 3

    def test_spectra_with_groups(self, tmp_path, signed_graph, series_csv, capsys):
        basis_dir = tmp_path / "basis"
        main(["basis", "--graph", str(signed_graph), "--kind", "idv", "--method", "greedy", "--out", str(basis_dir)])
        groups = tmp_path / "groups.json"
        groups.write_text(json.dumps({"low": [0, 1]}))
        out = tmp_path / "power.csv"
        code = main(["spectra", "--basis", str(basis_dir), "--series", str(series_csv),
                     "--groups", str(groups), "--out", str(out)])
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "k,frequency,value"
        total = sum(float(line.split(",")[2]) for line in lines[1:])
        assert total == pytest.approx(1.0 + 1.0 + 1.5)
        assert "other" in capsys.readouterr().out

    def test_series_size_mismatch(self, tmp_path, triangle, series_csv):
        basis_dir = tmp_path / "basis"
        main(["basis", "--graph", str(triangle), "--kind", "idv", "--method", "greedy", "--out", str(basis_dir)])
        code = main(["spectra", "--basis", str(basis_dir), "--series", str(series_csv), "--out", str(tmp_path / "p.csv")])
        assert code == EXIT_INPUT


class TestValidate:
    """Test the validate subcommand."""

    def test_dales_law_violation(self, tmp_path):
        path = tmp_path / "mixed.tsv"
        path.write_text("#n=3\n0 1 1.0\n0 2 -1.0\n")
        assert main(["validate", "--graph", str(path), "--dales-law"]) == EXIT_INVALID

    def test_compliant(self, tmp_path):
        path = tmp_path / "ok.tsv"
        path.write_text("#n=3\n0 1 1.0\n0 2 2.0\n2 1 -1.0\n")
        assert main(["validate", "--graph", str(path), "--dales-law"]) == EXIT_OK

    def test_complex_graph(self, tmp_path, capsys):
        path = tmp_path / "c.tsv"
        path.write_text("#n=2\n0 1 0.0 1.0\n")
        assert main(["validate", "--graph", str(path), "--dales-law"]) == EXIT_OK
        assert "complex" in capsys.readouterr().out

    def test_malformed_graph(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("0 1 x\n")
        assert main(["validate", "--graph", str(path)]) == EXIT_INPUT


class TestExperiments:
    """Test the experiment subcommands at toy sizes."""

    def test_discordance_positive_weights(self, tmp_path):
        out = tmp_path / "report"
        code = main(["--jobs", "1", "experiment-discordance", "--instances", "5", "--weights", "1", "--out", str(out)])
        assert code == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["fraction_discordant"] == 0.0
        assert summary["comparisons"] == 30
        assert (out / "rows.csv").exists()
        assert (out / "manifest.json").exists()

    def test_invalid_jobs(self, tmp_path):
        code = main(["--jobs", "0", "experiment-discordance", "--instances", "1", "--out", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_jobs_given_to_subcommand(self, tmp_path):
        out = tmp_path / "report"
        code = main(["experiment-discordance", "--jobs", "1", "--instances", "3", "--weights", "1", "--out", str(out)])
        assert code == EXIT_OK
        assert json.loads((out / "summary.json").read_text())["comparisons"] == 18
        assert main(["experiment-discordance", "--jobs", "0", "--instances", "1", "--out", str(tmp_path / "bad")]) == EXIT_USAGE

    def test_compare(self, tmp_path):
        out = tmp_path / "cmp"
        argv = ["--jobs", "1", "experiment-compare", "--M", "1", "--restarts", "1", "--max-iters", "20", "--out", str(out)]
        assert main(argv) == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["records"] == 12

    def test_case_study(self, tmp_path, signed_graph, series_csv):
        out = tmp_path / "case"
        argv = ["case-study", "--graph", str(signed_graph), "--series", str(series_csv),
                "--restarts", "1", "--max-iters", "50", "--out", str(out)]
        assert main(argv) == EXIT_OK
        assert (out / "summary.json").exists()
        assert (out / "power-greedy-idv.csv").exists()
        assert load_basis(out / "feasible-dv").kind.value == "dv"
