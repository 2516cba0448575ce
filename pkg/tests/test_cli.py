import json

import pytest

from belltriads.bipartite import nonviolation_bound, violation_probability_integral
from belltriads.cli import CSV_HEADER, run_cli
from belltriads.correlations import NoiseLevel
from belltriads.experiments import estimate_probability
from belltriads.mabk import tsirelson_threshold


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSweepCommand:
    def test_writes_requested_row_count(self, tmp_path, capsys):
        out = tmp_path / "rows.csv"
        code, _, _ = run(capsys, "sweep", "--n", "2", "--gamma-min", "0.84",
                         "--gamma-max", "1.0", "--steps", "17", "--samples", "2000",
                         "--seed", "42", "--out", str(out))
        assert code == 0
        lines = out.read_text(encoding="utf-8").split("\n")
        assert lines[0] == CSV_HEADER
        assert len([ln for ln in lines[1:] if ln]) == 17

    def test_csv_output_is_byte_stable(self, tmp_path, capsys):
        args = ["sweep", "--n", "2", "--gamma-min", "0.9", "--gamma-max", "1.0",
                "--steps", "3", "--samples", "1500", "--seed", "9"]
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert run_cli(args + ["--out", str(p)]) == 0
        capsys.readouterr()
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert b"\r" not in paths[0].read_bytes()

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "sweep", "--n", "2", "--gamma-min", "0.95",
                           "--gamma-max", "1.0", "--steps", "2", "--samples", "500",
                           "--seed", "1", "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert len(rows) == 2
        assert set(rows[0]) == {"gamma", "n_parties", "samples", "violations",
                                "p_hat", "std_error"}


class TestProbabilityCommand:
    def test_single_row_matches_library(self, capsys):
        code, out, _ = run(capsys, "probability", "--n", "2", "--gamma", "0.9",
                           "--samples", "4000", "--seed", "5")
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == CSV_HEADER
        est = estimate_probability(2, NoiseLevel(0.9), 4000, seed=5)
        fields = row.split(",")
        assert fields[0] == "0.9"
        assert int(fields[3]) == est.violations
        assert float(fields[4]) == pytest.approx(est.p_hat, abs=1e-12)

    def test_noiseless_run_is_certain(self, capsys):
        code, out, _ = run(capsys, "probability", "--n", "2", "--gamma", "1.0",
                           "--samples", "5000", "--seed", "42")
        assert code == 0
        fields = out.strip().split("\n")[1].split(",")
        assert fields[4] == "1"


class TestScalarCommands:
    def test_integral(self, capsys):
        code, out, _ = run(capsys, "integral", "--gamma", "0.98",
                           "--resolution", "128")
        assert code == 0
        expected = violation_probability_integral(NoiseLevel(0.98), 128)
        assert float(out.strip()) == pytest.approx(expected, abs=1e-12)

    def test_bound_prints_three_significant_figures(self, capsys):
        code, out, _ = run(capsys, "bound", "--gamma", "0.98")
        assert code == 0
        assert out.strip() == f"{nonviolation_bound(NoiseLevel(0.98)):.2e}"
        assert out.strip() == "8.40e-04"

    def test_threshold(self, capsys):
        code, out, _ = run(capsys, "threshold", "--n", "2")
        assert code == 0
        assert float(out.strip()) == pytest.approx(tsirelson_threshold(2), abs=1e-12)
        assert abs(float(out.strip()) - 0.840896) < 1e-6


class TestVerifyCommand:
    def test_oracle_suite_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "oracle", "--n", "3",
                           "--trials", "5", "--tol", "1e-10")
        assert code == 0
        assert "PASS" in out

    def test_region_suite_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "region", "--samples", "200",
                           "--gamma", "0.98", "--seed", "4")
        assert code == 0
        assert "counterexamples=0" in out


class TestErrorHandling:
    def test_malformed_numeric_flag_names_the_flag(self, capsys):
        code, _, err = run(capsys, "probability", "--n", "2", "--gamma", "abc",
                           "--samples", "10")
        assert code == 2
        assert "--gamma" in err

    def test_unknown_flag_rejected(self, capsys):
        code, _, _ = run(capsys, "threshold", "--n", "2", "--frobnicate", "1")
        assert code == 2

    def test_missing_required_flag(self, capsys):
        code, _, _ = run(capsys, "integral")
        assert code == 2

    def test_domain_error_exits_as_argument_error(self, capsys):
        code, _, err = run(capsys, "bound", "--gamma", "0.5")
        assert code == 2
        assert "gamma" in err

    def test_seed_determines_output(self, capsys):
        _, out1, _ = run(capsys, "probability", "--n", "2", "--gamma", "0.9",
                         "--samples", "3000", "--seed", "8")
        _, out2, _ = run(capsys, "probability", "--n", "2", "--gamma", "0.9",
                         "--samples", "3000", "--seed", "8")
        _, out3, _ = run(capsys, "probability", "--n", "2", "--gamma", "0.9",
                         "--samples", "3000", "--seed", "9")
        assert out1 == out2
        assert out1 != out3
