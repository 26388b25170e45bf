"""CLI surface: exit codes, output formats, manifests, and determinism."""
import json
import math

import pytest

from hardyz import Window, locate_zeros, ramachandra_constant
from hardyz.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestZerosCommand:
    def test_count_agrees_with_library(self, capsys):
        code, out, _ = run(["zeros", "--t", "14", "--width", "10"], capsys)
        assert code == 0
        lines = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert lines[0] == "gamma,gamma_plus,lambda,z_at_lambda"
        lib = locate_zeros(Window(14.0, 10.0))
        assert len(lines) - 1 == lib.count
        assert float(lines[1].split(",")[0]) == lib.records[0].gamma

    def test_json_format(self, capsys):
        code, out, _ = run(
            ["zeros", "--t", "14", "--width", "10", "--format", "json"], capsys
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["schema"] == "zeroset/1"
        assert obj["count"] >= 1

    def test_stationary_flag_fills_lambda(self, capsys):
        code, out, _ = run(
            ["zeros", "--t", "14", "--width", "10", "--stationary",
             "--format", "json"],
            capsys,
        )
        assert code == 0
        rec = json.loads(out)["records"][0]
        assert rec["lambda"] is not None

    def test_invalid_width(self, capsys):
        code, _, err = run(["zeros", "--t", "100", "--width", "-5"], capsys)
        assert code == 1
        assert "error" in err.lower()

    def test_scientific_notation_accepted(self, capsys):
        code, _, _ = run(["zeros", "--t", "1e3", "--width", "5e0"], capsys)
        assert code == 0


class TestMomentsCommand:
    def test_zeta_moment_json(self, capsys):
        code, out, _ = run(
            ["moments", "--which", "zeta", "--k", "1", "--t", "1e4",
             "--width", "4", "--format", "json"],
            capsys,
        )
        assert code == 0
        row = json.loads(out)
        assert row["which"] == "zeta"
        assert row["value"] > 0.0
        assert row["abs_error_estimate"] >= 0.0
        assert row["evals"] >= row["panels"]

    def test_zprime_zk_requires_k_at_least_two(self, capsys):
        code, _, err = run(
            ["moments", "--which", "zprime_zk", "--k", "1", "--t", "1e4",
             "--width", "2"],
            capsys,
        )
        assert code == 1
        assert "k" in err

    def test_zero_tolerance_rejected(self, capsys):
        code, _, err = run(
            ["moments", "--which", "zeta", "--k", "1", "--t", "1e4",
             "--width", "2", "--tol", "0"],
            capsys,
        )
        assert code == 1
        assert "tol" in err


class TestExtremaCommand:
    def test_emits_normalized_ratio(self, capsys):
        code, out, _ = run(
            ["extrema", "--t", "1e4", "--width", "10", "--k", "1",
             "--format", "json"],
            capsys,
        )
        assert code == 0
        row = json.loads(out)
        assert row["sum"] > 0.0
        assert row["conrey_ghosh_ratio"] > 0.0

    def test_empty_window_zero_sum(self, capsys):
        code, out, _ = run(
            ["extrema", "--t", "50", "--width", "0.5", "--k", "1",
             "--format", "json"],
            capsys,
        )
        assert code == 0
        row = json.loads(out)
        assert row["sum"] == 0.0
        assert row["zero_count"] == 0


class TestConstantsCommand:
    def test_k1_value(self, capsys):
        code, out, _ = run(
            ["constants", "--k", "1", "--prime-limit", "1000",
             "--format", "json"],
            capsys,
        )
        assert code == 0
        row = json.loads(out)
        assert abs(row["value"] - 0.5) < 1e-12

    def test_truncation_shrinks_with_prime_limit(self, capsys):
        ests = []
        for pl in ("1000", "100000"):
            code, out, _ = run(
                ["constants", "--k", "2", "--prime-limit", pl,
                 "--format", "json"],
                capsys,
            )
            assert code == 0
            ests.append(json.loads(out)["truncation_estimate"])
        assert ests[1] < ests[0]

    def test_optional_divisor_sum(self, capsys):
        code, out, _ = run(
            ["constants", "--k", "1", "--xi", "10", "--format", "json"],
            capsys,
        )
        assert code == 0
        row = json.loads(out)
        assert abs(row["divisor_square_sum"] - 7381.0 / 2520.0) < 1e-12


class TestDirichletCommand:
    def test_theta_flag(self, capsys):
        code, out, _ = run(
            ["dirichlet", "--k", "1", "--theta", "0.2", "--t", "1e4",
             "--width", "100", "--format", "json"],
            capsys,
        )
        assert code == 0
        row = json.loads(out)
        assert math.isclose(row["xi"], 1e4**0.2, rel_tol=1e-12)
        assert 0.5 < row["ratio"] < 1.5

    def test_xi_and_theta_are_exclusive(self, capsys):
        code, _, err = run(
            ["dirichlet", "--k", "1", "--xi", "5", "--theta", "0.2",
             "--t", "1e4", "--width", "100"],
            capsys,
        )
        assert code == 1
        assert "exactly one" in err
        code, _, _ = run(
            ["dirichlet", "--k", "1", "--t", "1e4", "--width", "100"], capsys
        )
        assert code == 1


class TestMeasureCommand:
    def test_monotone_rows(self, capsys):
        code, out, _ = run(
            ["measure", "--t", "1e4", "--half-width", "30",
             "--v-grid", "0.5:2.0:4", "--format", "json"],
            capsys,
        )
        assert code == 0
        rows = json.loads(out)
        mus = [r["mu"] for r in rows]
        assert all(a >= b for a, b in zip(mus, mus[1:]))

    def test_comma_grid(self, capsys):
        code, out, _ = run(
            ["measure", "--t", "1e4", "--half-width", "30",
             "--v-grid=-20,20", "--format", "json"],
            capsys,
        )
        assert code == 0
        rows = json.loads(out)
        assert math.isclose(rows[0]["mu"], 60.0, rel_tol=1e-9)
        assert rows[1]["mu"] == 0.0

    def test_bad_grid_spec(self, capsys):
        code, _, _ = run(
            ["measure", "--t", "1e4", "--half-width", "30",
             "--v-grid", "2:1:3"],
            capsys,
        )
        assert code == 1


class TestManifests:
    def test_written_next_to_output(self, tmp_path, capsys):
        out = tmp_path / "zeros.csv"
        code, _, _ = run(
            ["zeros", "--t", "1000", "--width", "3", "--out", str(out)], capsys
        )
        assert code == 0
        manifest = json.loads((tmp_path / "zeros.csv.manifest.json").read_text())
        assert manifest["command"] == "zeros"
        assert manifest["parameters"]["t"] == 1000.0
        assert manifest["outputs"] == [str(out)]
        assert manifest["wall_time_s"] >= 0.0
        assert len(manifest["config_hash"]) == 16

    def test_reruns_are_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run(
                ["zeros", "--t", "1000", "--width", "3", "--out", str(path)],
                capsys,
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        ma = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        mb = json.loads((tmp_path / "b.csv.manifest.json").read_text())
        assert ma["config_hash"] == mb["config_hash"]

    def test_config_changes_hash(self, tmp_path, capsys):
        hashes = []
        for i, depth in enumerate(("1", "2")):
            out = tmp_path / f"h{i}.csv"
            code, _, _ = run(
                ["zeros", "--t", "1000", "--width", "3",
                 "--rs-corrections", depth, "--out", str(out)],
                capsys,
            )
            assert code == 0
            hashes.append(
                json.loads((tmp_path / f"h{i}.csv.manifest.json").read_text())[
                    "config_hash"
                ]
            )
        assert hashes[0] != hashes[1]


class TestParsing:
    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"], capsys)[0] == 1

    def test_missing_required_flag(self, capsys):
        assert run(["zeros", "--t", "100"], capsys)[0] == 1

    def test_negative_threads(self, capsys):
        code, _, err = run(
            ["zeros", "--t", "100", "--width", "2", "--threads", "-1"], capsys
        )
        assert code == 1
        assert "threads" in err
