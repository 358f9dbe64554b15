"""Command line behavior: outputs, reports, exit codes."""

import json

import numpy as np
import pytest

from vqsvd.cli import main


@pytest.fixture
def pivot_matrix(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("0.0, 3.0\n4.0, 0.0\n")
    return str(p)


@pytest.fixture
def psd_matrix(tmp_path):
    p = tmp_path / "psd.csv"
    p.write_text("2.0, 1.0\n1.0, 2.0\n")
    return str(p)


@pytest.fixture
def identity_matrix(tmp_path):
    p = tmp_path / "eye.csv"
    p.write_text("0.70710678118654752, 0.0\n0.0, 0.70710678118654752\n")
    return str(p)


def test_svd_happy_path(pivot_matrix, tmp_path, capsys):
    report = tmp_path / "report.json"
    trace = tmp_path / "trace.csv"
    code = main(
        [
            "svd", pivot_matrix,
            "--mode", "direct",
            "--seed", "11",
            "--report-out", str(report),
            "--trace-out", str(trace),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "singular values" in out
    data = json.loads(report.read_text())
    np.testing.assert_allclose(data["result"]["singular_values"], [4.0, 3.0], atol=1e-3)
    assert data["status"] == "ok"
    assert data["seed"] == 11
    lines = trace.read_text().splitlines()
    assert lines[0] == "iter,L,grad_norm"
    assert len(lines) > 2


def test_svd_report_reproducible_up_to_timing(pivot_matrix, tmp_path):
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for r in (r1, r2):
        assert main(["svd", pivot_matrix, "--mode", "direct", "--seed", "5",
                     "--report-out", str(r)]) == 0
    d1, d2 = json.loads(r1.read_text()), json.loads(r2.read_text())
    d1.pop("timing")
    d2.pop("timing")
    assert d1 == d2


def test_svd_verify_against_oracle(pivot_matrix, capsys):
    code = main(["svd", pivot_matrix, "--mode", "direct", "--seed", "2", "--verify"])
    assert code == 0
    assert "verify: max singular value error" in capsys.readouterr().out


def test_svd_auto_seed_is_echoed(pivot_matrix, capsys):
    code = main(["svd", pivot_matrix, "--mode", "direct", "--restarts", "1",
                 "--epsilon", "1e-5"])
    assert code == 0
    assert "seed:" in capsys.readouterr().out


def test_svd_exit_3_when_iteration_budget_too_small(pivot_matrix, tmp_path, capsys):
    report = tmp_path / "r.json"
    code = main(["svd", pivot_matrix, "--mode", "direct", "--seed", "1",
                 "--max-iters", "1", "--report-out", str(report)])
    assert code == 3
    # the report is still written for a convergence failure
    assert json.loads(report.read_text())["status"] == "max-iters"


def test_svd_pinv_output(pivot_matrix, tmp_path):
    out = tmp_path / "pinv.csv"
    code = main(["svd", pivot_matrix, "--mode", "direct", "--seed", "3",
                 "--pinv-out", str(out)])
    assert code == 0
    plus = np.loadtxt(out, delimiter=",")
    np.testing.assert_allclose(plus, [[0.0, 0.25], [1 / 3, 0.0]], atol=1e-3)


def test_eigen_happy_path(psd_matrix, tmp_path, capsys):
    report = tmp_path / "r.json"
    code = main(["eigen", psd_matrix, "--mode", "direct", "--seed", "6",
                 "--report-out", str(report)])
    assert code == 0
    assert "eigenvalues" in capsys.readouterr().out
    data = json.loads(report.read_text())
    np.testing.assert_allclose(data["result"]["eigenvalues"], [3.0, 1.0], atol=5e-3)


def test_eigen_rejects_asymmetric(pivot_matrix):
    assert main(["eigen", pivot_matrix, "--mode", "direct", "--seed", "1"]) == 2


def test_probe_exact_table(identity_matrix, tmp_path, capsys):
    report = tmp_path / "r.json"
    code = main(["probe", identity_matrix, "--report-out", str(report)])
    assert code == 0
    out = capsys.readouterr().out
    assert "outcome probabilities" in out
    data = json.loads(report.read_text())
    assert data["exact"]["probabilities"]["00"] == pytest.approx(0.32, abs=1e-9)
    assert data["exact"]["l_value"] == pytest.approx(3 / np.sqrt(10), abs=1e-9)


def test_probe_both_modes(identity_matrix, capsys):
    code = main(["probe", identity_matrix, "--mode", "both", "--shots", "5000",
                 "--seed", "3"])
    assert code == 0
    out = capsys.readouterr().out
    assert "[exact]" in out
    assert "[shots=5000]" in out
    assert "std error" in out


def test_probe_params_file(identity_matrix, tmp_path):
    angles = tmp_path / "angles.txt"
    angles.write_text("\n".join(["0.0"] * 8) + "\n")
    assert main(["probe", identity_matrix, "--params", str(angles)]) == 0


def test_probe_params_file_wrong_length(identity_matrix, tmp_path):
    angles = tmp_path / "angles.txt"
    angles.write_text("0.0\n0.1\n")
    assert main(["probe", identity_matrix, "--params", str(angles)]) == 2


def test_probe_postselection_impossible_is_exit_4(tmp_path):
    p = tmp_path / "anti.csv"
    p.write_text("0.0, 1.0\n1.0, 0.0\n")
    assert main(["probe", str(p), "--pivot-tol", "0.0"]) == 4


def test_gradcheck_exact_passes(identity_matrix, capsys):
    code = main(["gradcheck", identity_matrix, "--q-blocks", "2"])
    assert code == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_gradcheck_shots_reports_tolerance(identity_matrix, capsys):
    code = main(["gradcheck", identity_matrix, "--q-blocks", "1", "--mode", "shots",
                 "--shots", "20000", "--seed", "9"])
    assert code == 0
    assert "statistical tolerance" in capsys.readouterr().out


def test_missing_file_is_exit_2(tmp_path):
    assert main(["svd", str(tmp_path / "nope.csv"), "--seed", "1"]) == 2


def test_unreadable_matrix_is_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("hello,world\n")
    assert main(["probe", str(bad)]) == 2


def test_verify_complex_matrix_is_exit_2(tmp_path):
    p = tmp_path / "cplx.txt"
    p.write_text("[1, 1] [0, 0]\n[0, 0] [1, -1]\n")
    assert main(["svd", str(p), "--mode", "direct", "--seed", "1", "--verify"]) == 2


def test_large_register_guard(tmp_path, capsys):
    big = tmp_path / "big.csv"
    rows = [", ".join(["1.0"] * 17) for _ in range(17)]
    big.write_text("\n".join(rows) + "\n")
    code = main(["probe", str(big)])
    assert code == 2
    assert "--allow-large" in capsys.readouterr().err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "vqsvd" in capsys.readouterr().out
