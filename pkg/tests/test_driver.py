"""Gradient ascent loop, factor extraction, and downstream products."""

import warnings

import numpy as np
import pytest

from vqsvd import errors
from vqsvd.ansatz import AnsatzParams, ansatz_matrix
from vqsvd.driver import (
    OptimizerConfig,
    SvdResult,
    eigendecompose_psd,
    extract,
    optimize,
    pseudoinverse,
    run_svd,
)
from vqsvd.matrix_core import make_weights, prepare
from vqsvd.oracle import jacobi_eigh, jacobi_svd

DIRECT = dict(eval_mode="direct")


def test_descending_diagonal_converges_immediately():
    """At zero angles on a descending positive diagonal the gradient is
    exactly zero, so the very first step changes nothing."""
    prep = prepare(np.diag([4.0, 1.0]))
    weights = make_weights(2)
    config = OptimizerConfig(init_scale=0.0, restarts=1, seed=0, **DIRECT)
    params, trace = optimize(prep, weights, config=config)
    assert trace.iterations == 1
    assert trace.converged
    best_l = trace.records[-1][1]
    assert best_l == pytest.approx(float(np.sum(weights.q * np.diag(prep.a))), abs=1e-12)
    np.testing.assert_allclose(params.gamma, 0.0, atol=1e-12)


def test_infinite_epsilon_stops_after_one_iteration():
    prep = prepare(np.array([[1.0, 2.0], [3.0, 4.0]]))
    weights = make_weights(2)
    config = OptimizerConfig(epsilon=np.inf, restarts=2, seed=1, **DIRECT)
    _, trace = optimize(prep, weights, config=config)
    assert trace.iterations == 1
    assert trace.converged
    assert len(trace.records) == 1


def test_optimize_reaches_the_weighted_ceiling():
    """Pivoted off-diagonal instance: sigma = (2,1)/sqrt(5), so the best
    L equals q . sigma = 1 exactly."""
    prep = prepare(np.array([[0.0, 2.0], [1.0, 0.0]]))
    weights = make_weights(2)
    config = OptimizerConfig(seed=7, eval_mode="exact")
    _, trace = optimize(prep, weights, config=config)
    assert trace.records[-1][1] == pytest.approx(1.0, abs=1e-4)


def test_optimize_trace_bookkeeping():
    prep = prepare(np.array([[1.0, 0.5], [0.2, -0.8]]))
    weights = make_weights(2)
    config = OptimizerConfig(restarts=3, seed=5, **DIRECT)
    params, trace = optimize(prep, weights, config=config)
    iters = [rec[0] for rec in trace.records]
    assert iters == list(range(1, len(iters) + 1))
    checksums = {rec[3] for rec in trace.records}
    assert len(checksums) > 1
    assert trace.records[-1][3] == params.checksum()
    assert len(trace.restart_final_values) == 3
    assert trace.chosen_restart == int(np.argmax(trace.restart_final_values))
    assert trace.wall_time > 0.0
    assert trace.postselect_stats is not None
    assert trace.postselect_stats["min"] <= trace.postselect_stats["max"]


def test_optimize_seeded_runs_identical():
    prep = prepare(np.array([[1.0, 0.5], [0.2, -0.8]]))
    weights = make_weights(2)
    a = optimize(prep, weights, config=OptimizerConfig(seed=9, **DIRECT))
    b = optimize(prep, weights, config=OptimizerConfig(seed=9, **DIRECT))
    np.testing.assert_array_equal(a[0].gamma, b[0].gamma)
    assert [r[1] for r in a[1].records] == [r[1] for r in b[1].records]


def test_small_steps_climb_monotonically():
    prep = prepare(np.array([[0.3, 1.1], [-0.4, 0.6]]))
    weights = make_weights(2)
    config = OptimizerConfig(
        learning_rate=0.01, max_iters=40, epsilon=0.0, restarts=1, seed=3, **DIRECT
    )
    _, trace = optimize(prep, weights, config=config)
    values = [rec[1] for rec in trace.records]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_no_progress_warning_fires():
    """Freeze the angles at a random non-optimal point (max_iters=0) on a
    near-rank-one matrix; the best L then stays below q0 * a00."""
    prep = prepare(np.diag([1.0, 0.05]))
    weights = make_weights(2)
    config = OptimizerConfig(max_iters=0, init_scale=1.5, restarts=2, seed=12, **DIRECT)
    with pytest.warns(errors.NoProgressWarning):
        _, trace = optimize(prep, weights, config=config)
    assert trace.no_progress


def test_extract_absorbs_negative_diagonal():
    """Angles (2*pi, 0) make b(alpha) = -I, so the raw diagonal is negated
    and the sign must move into the v columns."""
    prep = prepare(np.diag([4.0, 3.0]))
    weights = make_weights(2)
    params = AnsatzParams(1, 1, [2.0 * np.pi], [0.0])
    assert np.allclose(ansatz_matrix(1, params.alpha), -np.eye(2))
    result = extract(prep, weights, params)
    np.testing.assert_allclose(result.d, [0.8, 0.6], atol=1e-12)
    assert result.residual < 1e-12
    recon = (result.u_hat * result.d) @ result.v_hat.T
    np.testing.assert_allclose(recon, prep.a, atol=1e-12)


def test_extract_sorts_descending_stably():
    prep = prepare(np.diag([3.0, 4.0]), pivot_tol=0.0)
    weights = make_weights(2)
    params = AnsatzParams.zeros(1, 1)
    result = extract(prep, weights, params)
    np.testing.assert_allclose(result.d, [0.8, 0.6], atol=1e-12)
    # columns follow the diagonal reordering
    np.testing.assert_allclose(result.u_hat, np.eye(2)[:, [1, 0]], atol=1e-12)


def test_extract_tied_returns_shared_factor_and_clamps():
    prep = prepare(np.diag([1.0, 2.0]) / np.sqrt(5.0))
    weights = make_weights(2)
    params = AnsatzParams.zeros(1, 1, tie_mode="tied")
    result = extract(prep, weights, params)
    assert result.u_hat is result.v_hat
    assert np.all(result.d >= 0.0) or np.any(result.d < -1e-8)
    np.testing.assert_allclose(result.d, np.array([2.0, 1.0]) / np.sqrt(5.0), atol=1e-12)


def test_extract_tied_keeps_genuine_negatives():
    prep = prepare(np.diag([1.0, -2.0]))
    weights = make_weights(2)
    params = AnsatzParams.zeros(1, 1, tie_mode="tied")
    result = extract(prep, weights, params)
    assert result.d[-1] == pytest.approx(-2.0 / np.sqrt(5.0), abs=1e-12)
    assert result.u_hat is result.v_hat


def test_run_svd_matches_oracle():
    rng = np.random.default_rng(60)
    for _ in range(2):
        m = rng.normal(size=(2, 2))
        prep = prepare(m)
        weights = make_weights(2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", errors.NoProgressWarning)
            result = run_svd(prep, weights, config=OptimizerConfig(seed=21, **DIRECT))
        oracle = jacobi_svd(prep.padded_original())
        np.testing.assert_allclose(result.singular_values_original, oracle.sigma, atol=1e-3)
        assert result.residual < 1e-3 * prep.scale
        assert result.trace is not None


def test_eigendecompose_psd_matches_gram_oracle():
    rng = np.random.default_rng(61)
    s = rng.normal(size=(2, 2))
    m = s @ s.T
    prep = prepare(m)
    weights = make_weights(2)
    result = eigendecompose_psd(prep, weights, config=OptimizerConfig(seed=2, **DIRECT))
    assert result.u_hat is result.v_hat
    evals, _ = jacobi_eigh(prep.a)
    np.testing.assert_allclose(result.d, evals, atol=1e-3)


def test_eigendecompose_psd_validates_input():
    weights = make_weights(2)
    with pytest.raises(errors.NotSymmetricPSDError):
        eigendecompose_psd(prepare([[1.0, 2.0], [0.0, 1.0]]), weights)
    with pytest.raises(errors.NotSymmetricPSDError):
        eigendecompose_psd(prepare(np.diag([1.0, -1.0])), weights)
    with pytest.raises(errors.NotSymmetricPSDError):
        eigendecompose_psd(prepare(np.array([[1.0, 1j], [-1j, 1.0]])), weights)


def test_pseudoinverse_of_clean_result():
    prep = prepare(np.array([[0.0, 3.0], [4.0, 0.0]]))
    weights = make_weights(2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", errors.NoProgressWarning)
        result = run_svd(prep, weights, config=OptimizerConfig(seed=4, **DIRECT))
    plus = pseudoinverse(result)
    m = np.array([[0.0, 3.0], [4.0, 0.0]])
    np.testing.assert_allclose(plus, np.linalg.pinv(m), atol=5e-4)
    assert np.linalg.norm(m @ plus @ m - m) < 10.0 * result.residual


def test_pseudoinverse_rank_threshold():
    result = SvdResult(
        d=np.array([1.0, 1e-9]),
        u_hat=np.eye(2),
        v_hat=np.eye(2),
        residual=0.0,
    )
    plus = pseudoinverse(result, rank_tol=1e-6)
    np.testing.assert_allclose(plus, np.diag([1.0, 0.0]), atol=1e-12)


def test_pseudoinverse_rejects_zero_diagonal():
    result = SvdResult(d=np.zeros(2), u_hat=np.eye(2), v_hat=np.eye(2), residual=0.0)
    with pytest.raises(errors.ZeroMatrixError):
        pseudoinverse(result)


def test_adam_variant_also_converges():
    prep = prepare(np.array([[0.0, 2.0], [1.0, 0.0]]))
    weights = make_weights(2)
    config = OptimizerConfig(
        learning_rate=0.1, use_adam=True, epsilon=1e-9, seed=8, **DIRECT
    )
    _, trace = optimize(prep, weights, config=config)
    assert trace.records[-1][1] == pytest.approx(1.0, abs=1e-3)
