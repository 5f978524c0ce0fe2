import io
import json
import math

import pytest

from rangebounds import ConvergenceError, ValidationError
from rangebounds.cli import CliConfig, main, run

TRIPLE = '{"mu":[-1,0,1],"sigma":[1,1.7320508,1.4142136]}'


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConfigValidation:
    def test_rejects_unknown_command(self):
        with pytest.raises(ValidationError):
            CliConfig(command="solve")

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(ValidationError):
            CliConfig(command="bound", tol=0.0)

    def test_rejects_zero_samples(self):
        with pytest.raises(ValidationError):
            CliConfig(command="bound", samples=0)

    def test_rejects_unknown_format(self):
        with pytest.raises(ValidationError):
            CliConfig(command="bound", format="yaml")


class TestBoundCommand:
    def test_inline_json_input(self, capsys):
        code, out, _ = run_cli(capsys, "bound", "--input", TRIPLE)
        assert code == 0
        data = json.loads(out)
        assert data["rho"] == pytest.approx(4.0, abs=1e-6)
        assert list(data) == [
            "rho",
            "c",
            "lambda",
            "ag",
            "infimum",
            "method",
            "regions",
            "residual",
            "iterations",
        ]

    def test_file_input(self, capsys, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(TRIPLE)
        code, out, _ = run_cli(capsys, "bound", "--input", str(path))
        assert code == 0
        assert json.loads(out)["rho"] == pytest.approx(4.0, abs=1e-6)

    def test_stdin_input(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(TRIPLE))
        code, out, _ = run_cli(capsys, "bound", "--input", "-")
        assert code == 0
        assert json.loads(out)["rho"] == pytest.approx(4.0, abs=1e-6)

    def test_csv_output_has_scalar_rows(self, capsys):
        code, out, _ = run_cli(capsys, "bound", "--input", TRIPLE, "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "name,value"
        names = [line.split(",", 1)[0] for line in lines[1:]]
        assert "rho" in names and "lambda" in names
        assert all("regions" not in name for name in names)

    def test_output_byte_stable(self, capsys):
        _, first, _ = run_cli(capsys, "bound", "--input", TRIPLE)
        _, second, _ = run_cli(capsys, "bound", "--input", TRIPLE)
        assert first == second


class TestExtremalCommand:
    def test_emits_joint_and_coupling(self, capsys):
        code, out, _ = run_cli(capsys, "extremal", "--input", TRIPLE)
        assert code == 0
        data = json.loads(out)
        assert list(data) == ["mu", "sigma", "rho", "c", "lambda", "joint", "coupling"]
        masses = data["joint"]["prob"]
        assert sum(masses) == pytest.approx(1.0, abs=1e-12)
        n = len(data["mu"])
        assert all(len(row) == n for row in data["coupling"]["q"])

    def test_csv_format_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "extremal", "--input", TRIPLE, "--format", "csv"
        )
        assert code == 1
        assert "JSON-only" in err


class TestVerifyCommand:
    def test_bare_spec_passes(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--input", TRIPLE, "--samples", "20000"
        )
        assert code == 0
        data = json.loads(out)
        assert data["pass"] is True
        assert data["embedded_joint_pass"] is None
        assert data["moment_check"]["pass"] is True

    def test_extremal_output_round_trips(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "extremal", "--input", TRIPLE)
        assert code == 0
        path = tmp_path / "extremal.json"
        path.write_text(out)
        code, out, _ = run_cli(
            capsys, "verify", "--input", str(path), "--samples", "20000"
        )
        assert code == 0
        data = json.loads(out)
        assert data["pass"] is True
        assert data["embedded_joint_pass"] is True

    def test_csv_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--input", TRIPLE, "--samples", "5000", "--format", "csv"
        )
        assert code == 0
        assert out.splitlines()[0] == "name,value"
        assert any(line.startswith("pass,true") for line in out.splitlines())


class TestCompareCommand:
    def test_heterogeneous_spec_leaves_iid_bound_null(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare", "--input", '{"mu":[0,0,0],"sigma":[1,1,3]}'
        )
        assert code == 0
        data = json.loads(out)
        assert list(data) == ["rho", "ag", "bnt_range", "plackett", "infimum"]
        assert data["rho"] == pytest.approx(3.0 + math.sqrt(2.0), abs=1e-5)
        assert data["ag"] == pytest.approx(math.sqrt(22.0), abs=1e-5)
        assert data["plackett"] is None

    def test_homogeneous_spec_reports_iid_bound(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare", "--input", '{"mu":[1,1,1],"sigma":[2,2,2]}'
        )
        assert code == 0
        data = json.loads(out)
        assert data["plackett"] == pytest.approx(2.0 * math.sqrt(3.0), abs=1e-9)


class TestPaperExamplesCommand:
    def test_all_targets_pass(self, capsys):
        code, out, _ = run_cli(capsys, "paper-examples")
        assert code == 0
        data = json.loads(out)
        assert data["pass"] is True
        assert all(case["pass"] for case in data["cases"])
        names = {case["case"] for case in data["cases"]}
        assert names == {
            "ag-tight-triple",
            "asymmetric-spread-triple",
            "homogeneous-triple",
            "equal-means-big-outlier",
            "two-balanced-groups",
            "single-outlier-mean",
        }


class TestErrorHandling:
    def test_missing_input_exits_one(self, capsys):
        code, _, err = run_cli(capsys, "bound")
        assert code == 1
        assert "--input" in err

    def test_malformed_json_exits_one(self, capsys):
        code, _, err = run_cli(capsys, "bound", "--input", '{"mu": [0, 1], "sigma"')
        assert code == 1
        assert "JSON" in err

    def test_missing_file_exits_one(self, capsys):
        code, _, err = run_cli(capsys, "bound", "--input", "/nonexistent/spec.json")
        assert code == 1
        assert "not found" in err

    def test_invalid_spec_exits_one(self, capsys):
        code, _, err = run_cli(
            capsys, "bound", "--input", '{"mu":[0,1],"sigma":[1,-1]}'
        )
        assert code == 1
        assert "sigma" in err

    def test_unknown_subcommand_exits_one(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 1

    def test_nonconvergence_exits_two(self, capsys, monkeypatch):
        def explode(spec, tol=1e-10):
            raise ConvergenceError("stalled", best=None)

        monkeypatch.setattr("rangebounds.cli.rho_bound", explode)
        code, _, err = run_cli(capsys, "bound", "--input", TRIPLE)
        assert code == 2
        assert "converge" in err
