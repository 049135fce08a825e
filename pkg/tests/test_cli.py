import json

import numpy as np
import pytest

from matleg import Matrix
from matleg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def matrix_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(Matrix.diag(2.0, 1.0).to_json_dict()))
    return str(path)


DETPOWER = '{"kind":"detpower","n":2,"p":4}'


class TestEvalGrad:
    def test_eval_value(self, capsys, matrix_file):
        code, out, _ = run(capsys, "eval", "--family", DETPOWER, "--matrix", matrix_file)
        assert code == 0
        assert json.loads(out) == pytest.approx(2.0)

    def test_eval_inline_matrix(self, capsys):
        code, out, _ = run(
            capsys,
            "eval",
            "--family",
            DETPOWER,
            "--matrix",
            '{"rows":2,"cols":2,"entries":[[2,0],[0,1]]}',
        )
        assert code == 0 and json.loads(out) == pytest.approx(2.0)

    def test_grad_matrix_output(self, capsys, matrix_file):
        code, out, _ = run(capsys, "grad", "--family", DETPOWER, "--matrix", matrix_file)
        assert code == 0
        got = json.loads(out)
        assert got["rows"] == 2 and got["cols"] == 2
        np.testing.assert_allclose(got["entries"], [[2.0, 0.0], [0.0, 4.0]], atol=1e-14)

    def test_domain_error_exit_3(self, capsys):
        code, out, err = run(
            capsys,
            "eval",
            "--family",
            '{"kind":"logdet","n":2}',
            "--matrix",
            '{"rows":2,"cols":2,"entries":[[1,0],[0,0]]}',
        )
        assert code == 3
        assert out == ""
        assert err.startswith("error:")

    def test_malformed_matrix_exit_2_no_partial_output(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("this is not json")
        code, out, err = run(capsys, "eval", "--family", DETPOWER, "--matrix", str(bad))
        assert code == 2 and out == "" and "error:" in err

    def test_missing_file_exit_2(self, capsys, tmp_path):
        code, out, err = run(
            capsys, "eval", "--family", DETPOWER, "--matrix", str(tmp_path / "nope.json")
        )
        assert code == 2 and "not found" in err

    def test_unknown_family_kind_exit_2(self, capsys, matrix_file):
        code, _, err = run(
            capsys, "eval", "--family", '{"kind":"mystery","n":2}', "--matrix", matrix_file
        )
        assert code == 2 and "unknown family kind" in err

    def test_unknown_keys_rejected(self, capsys, matrix_file):
        code, _, err = run(
            capsys,
            "eval",
            "--family",
            '{"kind":"detpower","n":2,"p":4,"bogus":1}',
            "--matrix",
            matrix_file,
        )
        assert code == 2 and "unknown keys" in err


class TestDual:
    def test_detpower_example(self, capsys):
        code, out, _ = run(capsys, "dual", "--family", DETPOWER)
        assert code == 0
        assert out == '{"kind": "detpower", "n": 2, "p": 1.3333333333333333}\n'

    def test_logdet_shift(self, capsys):
        code, out, _ = run(capsys, "dual", "--family", '{"kind":"logdet","n":3}')
        assert json.loads(out) == {"kind": "logdet", "n": 3, "shift": 3.0}

    def test_detroot_manifold_zero(self, capsys):
        code, out, _ = run(capsys, "dual", "--family", '{"kind":"detroot","n":2}')
        assert json.loads(out) == {"kind": "zeromanifold", "n": 2}

    def test_cofactor_exponent_maps(self, capsys):
        code, out, _ = run(
            capsys, "dual", "--family", '{"kind":"areapower","alpha":2,"beta":0.5}'
        )
        got = json.loads(out)
        assert got["kind"] == "areapower_dual"
        assert got["alpha"] == 2.0 and got["beta"] == 0.5 and got["scale"] == 1.0

    def test_byte_identical_output(self, capsys):
        _, out1, _ = run(capsys, "dual", "--family", DETPOWER)
        _, out2, _ = run(capsys, "dual", "--family", DETPOWER)
        assert out1 == out2


class TestVerify:
    def test_passing_family(self, capsys, tmp_path):
        report = tmp_path / "report.json"
        code, out, _ = run(
            capsys,
            "verify",
            "--family",
            DETPOWER,
            "--seed",
            "42",
            "--samples",
            "40",
            "--report",
            str(report),
        )
        assert code == 0
        assert json.loads(out)["overall_pass"] is True
        body = json.loads(report.read_text())
        assert body["overall_pass"] is True
        assert body["config"]["seed"] == 42
        names = [c["name"] for c in body["checks"]]
        assert "roundtrip" in names and "roundtrip_negative_control" in names

    def test_failing_tolerance_exit_1(self, capsys, tmp_path):
        report = tmp_path / "report.json"
        code, out, _ = run(
            capsys,
            "verify",
            "--family",
            DETPOWER,
            "--samples",
            "20",
            "--report",
            str(report),
            "--tol-fd",
            "1e-18",
        )
        assert code == 1
        assert json.loads(report.read_text())["overall_pass"] is False

    def test_report_bytes_deterministic(self, capsys, tmp_path):
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        run(capsys, "verify", "--family", DETPOWER, "--samples", "25", "--report", str(r1))
        run(capsys, "verify", "--family", DETPOWER, "--samples", "25", "--report", str(r2))
        assert r1.read_bytes() == r2.read_bytes()

    def test_thread_env_cap(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("MATLEG_THREADS", "2")
        report = tmp_path / "report.json"
        code, _, _ = run(
            capsys, "verify", "--family", DETPOWER, "--samples", "20", "--report", str(report)
        )
        assert code == 0

    def test_thread_env_invalid_exit_2(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("MATLEG_THREADS", "many")
        code, _, err = run(
            capsys,
            "verify",
            "--family",
            DETPOWER,
            "--samples",
            "20",
            "--report",
            str(tmp_path / "r.json"),
        )
        assert code == 2 and "MATLEG_THREADS" in err


class TestSolve:
    PROBLEM = (
        '{"n":2,"p":4,"A":{"kind":"scaled","a":1.0},'
        '"f":{"rows":2,"cols":2,"entries":[[0.1,0],[0,0.1]]}}'
    )

    def test_solve_dual_path(self, capsys, tmp_path):
        out_file = tmp_path / "sol.json"
        code, out, _ = run(capsys, "solve", "--problem", self.PROBLEM, "--out", str(out_file))
        assert code == 0
        summary = json.loads(out)
        assert summary["converged"] is True
        body = json.loads(out_file.read_text())
        assert body["converged"] is True
        assert body["primal_residual"] <= 1e-6
        assert body["nonminimality_witness"] is not None

    def test_solve_coercive_path(self, capsys, tmp_path):
        problem = self.PROBLEM.replace('"p":4', '"p":1.5')
        out_file = tmp_path / "sol.json"
        code, _, _ = run(capsys, "solve", "--problem", str(problem), "--out", str(out_file))
        assert code == 0
        body = json.loads(out_file.read_text())
        assert body["y_star"] is None and body["dual_residual"] is None

    def test_solver_failure_exit_1(self, capsys, tmp_path):
        code, out, err = run(
            capsys,
            "solve",
            "--problem",
            self.PROBLEM,
            "--out",
            str(tmp_path / "sol.json"),
            "--max-iter",
            "1",
        )
        assert code == 1 and "error:" in err

    def test_problem_parse_error_exit_2(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "solve", "--problem", '{"n":2}', "--out", str(tmp_path / "s.json")
        )
        assert code == 2


class TestUsage:
    def test_no_command_exit_2(self, capsys):
        assert main([]) == 2

    def test_unknown_command_exit_2(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_help_exit_0(self, capsys):
        assert main(["--help"]) == 0

    @pytest.mark.parametrize(
        "payload",
        [
            '{"rows":2,"cols":2,"entries":3}',
            '{"rows":2,"cols":2,"entries":[3,4]}',
            '{"rows":"2","cols":2,"entries":[[1,0],[0,1]]}',
            '{"rows":2,"cols":2,"entries":[[1,"x"],[0,1]]}',
            "[]",
            "3",
            "{}",
        ],
    )
    def test_malformed_matrix_payloads_exit_2(self, capsys, payload):
        code, out, err = run(capsys, "eval", "--family", DETPOWER, "--matrix", payload)
        assert code == 2 and out == "" and err.startswith("error:")

    @pytest.mark.parametrize(
        "payload",
        [
            '{"n":2.5,"p":4,"A":{"kind":"scaled","a":1},"f":{"rows":2,"cols":2,"entries":[[0,0],[0,0]]}}',
            '{"n":2,"p":"x","A":{"kind":"scaled","a":1},"f":{"rows":2,"cols":2,"entries":[[0,0],[0,0]]}}',
            '{"n":2,"p":4,"A":{"kind":"dense","entries":"zzz"},"f":{"rows":2,"cols":2,"entries":[[0,0],[0,0]]}}',
            '{"n":2,"p":4,"A":{"kind":"wat"},"f":{"rows":2,"cols":2,"entries":[[0,0],[0,0]]}}',
        ],
    )
    def test_malformed_problem_payloads_exit_2(self, capsys, tmp_path, payload):
        code, _, err = run(
            capsys, "solve", "--problem", payload, "--out", str(tmp_path / "x.json")
        )
        assert code == 2 and err.startswith("error:")
