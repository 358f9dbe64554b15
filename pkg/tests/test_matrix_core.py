"""Preparation, weights, file loading, and factor restoration."""

import numpy as np
import pytest

from vqsvd import errors, matrix_core
from vqsvd.driver import SvdResult
from vqsvd.matrix_core import load_matrix, make_weights, prepare, restore_factors


def test_prepare_pivots_and_normalizes():
    # frozen by hand: max entry 4 at (1,0), Frobenius norm 5
    prep = prepare([[0.0, 3.0], [4.0, 0.0]])
    assert prep.n == 1
    assert prep.scale == 5.0
    assert prep.phase == 0.0
    np.testing.assert_allclose(prep.a, [[0.8, 0.0], [0.0, 0.6]], atol=1e-15)
    assert list(prep.row_perm) == [1, 0]
    assert list(prep.col_perm) == [0, 1]


def test_prepare_keeps_real_matrices_real():
    prep = prepare([[-2.0, 1.0], [0.5, 1.0]])
    assert not np.iscomplexobj(prep.a)
    assert prep.phase == np.pi
    assert prep.a[0, 0] > 0


def test_prepare_pads_non_square_and_non_power():
    m = np.arange(6, dtype=float).reshape(2, 3) + 1.0
    prep = prepare(m)
    assert prep.n == 2
    assert prep.a.shape == (4, 4)
    padded = prep.padded_original()
    assert padded.shape == (4, 4)
    np.testing.assert_array_equal(padded[:2, :3], m)
    assert np.all(padded[2:, :] == 0) and np.all(padded[:, 3:] == 0)


def test_prepare_single_entry_uses_one_qubit():
    prep = prepare([[5.0]])
    assert prep.n == 1
    np.testing.assert_allclose(prep.a, [[1.0, 0.0], [0.0, 0.0]])
    assert prep.scale == 5.0


def test_prepare_complex_phase_removal():
    m = np.array([[1j, 0.0], [0.0, 0.5]])
    prep = prepare(m)
    assert np.iscomplexobj(prep.a)
    assert abs(prep.a[0, 0].imag) < 1e-15
    assert prep.a[0, 0].real > 0
    np.testing.assert_allclose(prep.unprepare(), m, atol=1e-15)


def test_prepare_no_pivot_when_corner_is_large_enough():
    prep = prepare([[1.0, 0.0], [0.0, 3.0]])
    assert list(prep.row_perm) == [0, 1]
    assert prep.a[0, 0] == pytest.approx(1.0 / np.sqrt(10.0))


def test_prepare_pivot_tol_zero_disables_pivoting():
    prep = prepare([[0.0, 3.0], [4.0, 0.0]], pivot_tol=0.0)
    assert list(prep.row_perm) == [0, 1]
    assert prep.a[0, 0] == 0.0


def test_prepare_rejects_bad_input():
    with pytest.raises(errors.AllZeroMatrixError):
        prepare(np.zeros((2, 2)))
    with pytest.raises(errors.NonFiniteEntryError):
        prepare([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(errors.DimensionMismatchError):
        prepare(np.ones(4))


def test_unprepare_round_trip():
    rng = np.random.default_rng(42)
    for _ in range(25):
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(1, 5))
        m = rng.normal(size=(rows, cols))
        prep = prepare(m)
        assert np.linalg.norm(prep.a) == pytest.approx(1.0, abs=1e-12)
        back = prep.unprepare()
        np.testing.assert_allclose(back, prep.padded_original(), atol=1e-12)


def test_make_weights_linear():
    w = make_weights(2, "linear")
    np.testing.assert_allclose(w.q, np.array([2.0, 1.0]) / np.sqrt(5.0))
    assert w.t == 2 and w.scheme == "linear"


def test_make_weights_geometric_and_truncation():
    w = make_weights(4, "geometric", t=2)
    np.testing.assert_allclose(w.q, np.array([1.0, 0.5, 0.0, 0.0]) / np.sqrt(1.25))
    assert w.q[2] == 0.0 and w.q[3] == 0.0


def test_make_weights_strictly_decreasing_prefix():
    for scheme in ("linear", "geometric"):
        for t in (1, 2, 3, 4):
            w = make_weights(4, scheme, t=t)
            prefix = w.q[:t]
            assert np.all(np.diff(prefix) < 0) or t == 1
            assert np.all(prefix > 0)
            assert np.linalg.norm(w.q) == pytest.approx(1.0)


def test_make_weights_rejects_bad_rank():
    with pytest.raises(errors.InvalidRankError):
        make_weights(4, t=0)
    with pytest.raises(errors.InvalidRankError):
        make_weights(4, t=5)
    with pytest.raises(errors.InvalidRankError):
        make_weights(4, scheme="harmonic")


def test_load_matrix_csv(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1.0, 2.0\n3.0, -4.0\n")
    m = load_matrix(p)
    assert m.dtype == np.float64
    np.testing.assert_array_equal(m, [[1.0, 2.0], [3.0, -4.0]])


def test_load_matrix_complex_pairs(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("[1, 2] [0, -1]\n[0, 0] [3, 0]\n")
    m = load_matrix(p)
    assert m.dtype == np.complex128
    np.testing.assert_array_equal(m, [[1 + 2j, -1j], [0, 3]])


def test_load_matrix_demotes_real_valued_complex(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("[1, 0] [2, 0]\n")
    m = load_matrix(p)
    assert m.dtype == np.float64


def test_load_matrix_errors(tmp_path):
    ragged = tmp_path / "ragged.txt"
    ragged.write_text("[1, 0] [2, 0]\n[1, 0]\n")
    with pytest.raises(errors.DimensionMismatchError):
        load_matrix(ragged)
    garbage = tmp_path / "garbage.csv"
    garbage.write_text("not,a,number\n")
    with pytest.raises(errors.DimensionMismatchError):
        load_matrix(garbage)


def test_restore_factors_recovers_pivoted_svd():
    """The [[0, 3], [4, 0]] example again: a is diag(0.8, 0.6), so the
    identity factors of `a` must map back to sigma = (4, 3) for M."""
    prep = prepare([[0.0, 3.0], [4.0, 0.0]])
    result = SvdResult(
        d=np.array([0.8, 0.6]),
        u_hat=np.eye(2),
        v_hat=np.eye(2),
        residual=0.0,
    )
    restored = restore_factors(result, prep)
    np.testing.assert_allclose(restored.singular_values_original, [4.0, 3.0])
    assert restored.residual < 1e-12
    recon = (restored.u_hat * restored.singular_values_original) @ restored.v_hat.T
    np.testing.assert_allclose(recon, [[0.0, 3.0], [4.0, 0.0]], atol=1e-12)


def test_restore_factors_folds_sign_into_u():
    prep = prepare(-2.0 * np.eye(2))
    assert prep.phase == np.pi
    result = SvdResult(d=np.ones(2) / np.sqrt(2), u_hat=np.eye(2), v_hat=np.eye(2), residual=0.0)
    restored = restore_factors(result, prep)
    np.testing.assert_allclose(restored.u_hat, -np.eye(2))
    np.testing.assert_allclose(restored.singular_values_original, [2.0, 2.0])
    assert restored.residual < 1e-12
