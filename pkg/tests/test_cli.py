"""Command-line surface: outputs, determinism, exit codes."""

import csv
import io
import json

import pytest

from chainbinom import load_csv
from chainbinom.cli import run_command


def run(capsys, *argv):
    code = run_command(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class TestPmf:
    def test_sums_to_one(self, capsys):
        code, out, _ = run(capsys, "pmf", "--s0", "5", "--i0", "1", "--sar", "0.2",
                           "--generations", "5")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 6
        assert abs(sum(float(r["probability"]) for r in rows) - 1.0) < 1e-12

    def test_final_when_generations_omitted(self, capsys):
        code, out, _ = run(capsys, "pmf", "--s0", "3", "--sar", "0.4")
        assert code == 0
        assert "# generations=final" in out

    def test_json_meta_block(self, capsys):
        code, out, _ = run(capsys, "pmf", "--s0", "2", "--sar", "0.5", "--format", "json")
        doc = json.loads(out)
        assert doc["meta"]["command"] == "pmf"
        assert len(doc["results"]) == 3


class TestEstimate:
    def test_coronahouse_nonvoc(self, capsys):
        code, out, _ = run(capsys, "estimate", "--data", "coronahouse",
                           "--filter", "variant=nonvoc")
        assert code == 0
        row = parse_csv(out)[0]
        assert float(row["sar_hat"]) == pytest.approx(0.28, abs=0.01)
        assert row["ci_method"] == "wilks"

    def test_normal_interval_option(self, capsys):
        code, out, _ = run(capsys, "estimate", "--data", "coronahouse",
                           "--filter", "variant=alpha", "--ci", "normal")
        assert code == 0
        row = parse_csv(out)[0]
        assert float(row["sar_hat"]) == pytest.approx(0.61, abs=0.01)
        assert row["ci_method"] == "normal"

    def test_missing_file_is_data_error(self, capsys):
        code, _, err = run(capsys, "estimate", "--data", "/nonexistent.csv")
        assert code == 2
        assert err

    def test_overly_strict_filter_is_data_error(self, capsys):
        code, _, err = run(capsys, "estimate", "--data", "coronahouse",
                           "--filter", "variant=delta")
        assert code == 2


class TestGlm:
    def test_identity_variant_effect(self, capsys):
        code, out, _ = run(capsys, "glm", "--data", "coronahouse",
                           "--predictors", "variant", "--link", "identity")
        assert code == 0
        rows = parse_csv(out)
        effect = next(r for r in rows if r["term"] == "variant=nonvoc")
        assert float(effect["estimate"]) == pytest.approx(-0.33, abs=0.01)

    def test_intercept_only_logit(self, capsys):
        code, out, _ = run(capsys, "glm", "--data", "coronahouse")
        assert code == 0
        rows = parse_csv(out)
        assert [r["term"] for r in rows] == ["intercept"]


class TestSimulate:
    def test_round_trips_through_loader(self, capsys, tmp_path):
        code, out, _ = run(capsys, "simulate", "--n", "25", "--sar", "0.4",
                           "--seed", "3", "--final")
        assert code == 0
        path = tmp_path / "sim.csv"
        path.write_text(out, encoding="utf-8")
        ds = load_csv(path)
        assert len(ds) == 25
        first = ds.records[0]
        rewritten = out.splitlines()[1]
        assert rewritten.startswith(f"{first.id},{first.s0},{first.i0},{first.infected},")

    def test_byte_identical_reruns(self, capsys):
        args = ("simulate", "--n", "10", "--sar", "0.3", "--seed", "42")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_fixed_horizon_recorded(self, capsys):
        code, out, _ = run(capsys, "simulate", "--n", "4", "--sar", "0.3",
                           "--generations", "2", "--seed", "1")
        assert code == 0
        for row in parse_csv(out):
            assert row["generations"] == "2"


class TestCoverage:
    def test_small_run(self, capsys):
        code, out, _ = run(capsys, "coverage", "--n", "10", "--sar", "0.5",
                           "--levels", "0.8", "--replications", "10", "--seed", "9")
        assert code == 0
        rows = parse_csv(out)
        assert {r["method"] for r in rows} == {"wilks", "normal"}
        assert all(r["horizon"] == "final" for r in rows)
        assert "# rng=PCG64" in out

    def test_deterministic_output(self, capsys):
        args = ("coverage", "--n", "8", "--sar", "0.4", "--levels", "0.9",
                "--replications", "5", "--seed", "4", "--format", "json")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second
        doc = json.loads(first)
        assert doc["meta"]["replications"] == 5


class TestUsage:
    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 1

    def test_missing_required_flag(self, capsys):
        assert run(capsys, "pmf", "--sar", "0.2")[0] == 1

    def test_bad_sar_value(self, capsys):
        code, _, err = run(capsys, "pmf", "--s0", "3", "--sar", "1.4")
        assert code == 1
        assert err

    def test_help_exits_zero(self, capsys):
        assert run(capsys, "--help")[0] == 0

    def test_version_exits_zero(self, capsys):
        assert run(capsys, "--version")[0] == 0
