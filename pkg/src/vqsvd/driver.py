"""Classical outer loop: gradient ascent over the circuit angles, factor
extraction, and the downstream linear-algebra products.

The L sequence is recorded verbatim per iteration (never forced monotone);
the best restart by final L wins. A NoProgressWarning fires when even the
best restart ends below the trivial reference value q0 * a00.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import matrix_core
from .ansatz import AnsatzParams, ansatz_matrix, default_q_blocks
from .errors import (
    NoProgressWarning,
    NotSymmetricPSDError,
    ZeroMatrixError,
)
from .estimator import evaluate, gradient

TIED_CLAMP = 1e-8


@dataclass
class OptimizerConfig:
    learning_rate: float = 0.3
    max_iters: int = 5000
    epsilon: float = 1e-8
    restarts: int = 3
    init_scale: float = 0.1
    seed: int | None = None
    eval_mode: str = "exact"
    shots: int = 100_000
    sampling: str = "postselected"
    use_adam: bool = False
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8


@dataclass
class OptimizationTrace:
    """Per-iteration records (iter, L, grad norm, params checksum) of the
    chosen restart, plus run-level bookkeeping."""

    records: list = field(default_factory=list)
    chosen_restart: int = 0
    converged: bool = False
    restart_final_values: list = field(default_factory=list)
    iterations: int = 0
    wall_time: float = 0.0
    no_progress: bool = False
    postselect_stats: dict | None = None


@dataclass
class SvdResult:
    """Diagonal estimates and orthogonal factors for the working matrix,
    mapped back to the original after restore_factors."""

    d: np.ndarray
    u_hat: np.ndarray
    v_hat: np.ndarray
    residual: float
    singular_values_original: np.ndarray | None = None
    trace: OptimizationTrace | None = None


def _eval_seeder(config, rng):
    if config.eval_mode != "shots":
        return lambda: None
    return lambda: int(rng.integers(0, 2**63 - 1))


def _run_restart(prep, weights, params, config, rng):
    next_seed = _eval_seeder(config, rng)

    def value(p, seed):
        return evaluate(
            prep,
            weights,
            p,
            mode=config.eval_mode,
            shots=config.shots,
            seed=seed,
            sampling=config.sampling,
        )

    records = []
    pstats = {"count": 0, "min": np.inf, "max": -np.inf, "final": None}

    def note(sample):
        if sample.postselect_prob is None:
            return
        pstats["count"] += 1
        pstats["min"] = min(pstats["min"], sample.postselect_prob)
        pstats["max"] = max(pstats["max"], sample.postselect_prob)
        pstats["final"] = sample.postselect_prob

    sample = value(params, next_seed())
    note(sample)
    l_prev = sample.l_value
    converged = False
    adam_m = np.zeros(params.num_free)
    adam_v = np.zeros(params.num_free)
    iteration = 0
    for iteration in range(1, config.max_iters + 1):
        grad = gradient(
            prep,
            weights,
            params,
            mode=config.eval_mode,
            shots=config.shots,
            seed=next_seed(),
            sampling=config.sampling,
        )
        if config.use_adam:
            adam_m = config.adam_beta1 * adam_m + (1 - config.adam_beta1) * grad
            adam_v = config.adam_beta2 * adam_v + (1 - config.adam_beta2) * grad**2
            m_hat = adam_m / (1 - config.adam_beta1**iteration)
            v_hat = adam_v / (1 - config.adam_beta2**iteration)
            step = config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
        else:
            step = config.learning_rate * grad
        params = params.with_gamma(params.gamma + step)
        sample = value(params, next_seed())
        note(sample)
        records.append((iteration, sample.l_value, float(np.linalg.norm(grad)), params.checksum()))
        if abs(sample.l_value - l_prev) < config.epsilon:
            converged = True
            l_prev = sample.l_value
            break
        l_prev = sample.l_value
    if pstats["count"] == 0:
        pstats = None
    return params, l_prev, records, converged, iteration, pstats


def optimize(
    prep,
    weights,
    q_blocks: int | None = None,
    tie_mode: str = "independent",
    config: OptimizerConfig | None = None,
):
    """Gradient-ascend L from `restarts` random initializations.

    Returns (best params, OptimizationTrace).
    """
    if config is None:
        config = OptimizerConfig()
    if q_blocks is None:
        q_blocks = default_q_blocks(prep.n)
    t0 = time.perf_counter()
    seed_seq = np.random.SeedSequence(config.seed)
    best = None
    final_values = []
    for restart, child in enumerate(seed_seq.spawn(config.restarts)):
        rng = np.random.default_rng(child)
        params0 = AnsatzParams.random_init(
            prep.n, q_blocks, config.init_scale, rng, tie_mode=tie_mode
        )
        outcome = _run_restart(prep, weights, params0, config, rng)
        final_values.append(outcome[1])
        if best is None or outcome[1] > best[1][1]:
            best = (restart, outcome)
    chosen, (params, l_final, records, converged, iters, pstats) = best
    trace = OptimizationTrace(
        records=records,
        chosen_restart=chosen,
        converged=converged,
        restart_final_values=final_values,
        iterations=iters,
        wall_time=time.perf_counter() - t0,
        postselect_stats=pstats,
    )
    floor = float(weights.q[0] * prep.a[0, 0].real)
    if l_final < floor:
        trace.no_progress = True
        warnings.warn(
            NoProgressWarning(
                f"best objective {l_final:.6g} below identity-parameter floor {floor:.6g}"
            )
        )
    return params, trace


def extract(prep, weights, params: AnsatzParams, trace=None) -> SvdResult:
    """Read factors off the converged angles.

    Independent mode absorbs negative diagonal entries into the matching
    v_hat column; tied mode keeps u_hat and v_hat the same object and only
    clamps noise-level negatives.
    """
    b_alpha = ansatz_matrix(prep.n, params.alpha)
    if params.tie_mode == "tied":
        b_beta = b_alpha
    else:
        b_beta = ansatz_matrix(prep.n, params.beta)
    core = b_alpha.T @ prep.a @ b_beta
    d = np.real(np.diag(core)).copy()
    u_hat = b_alpha.copy()
    if params.tie_mode == "tied":
        v_hat = u_hat
        d[(d < 0) & (d > -TIED_CLAMP)] = 0.0
        order = np.argsort(-d, kind="stable")
        d = d[order]
        u_hat = u_hat[:, order]
        v_hat = u_hat
    else:
        v_hat = b_beta.copy()
        negative = d < 0
        d[negative] = -d[negative]
        v_hat[:, negative] = -v_hat[:, negative]
        order = np.argsort(-d, kind="stable")
        d = d[order]
        u_hat = u_hat[:, order]
        v_hat = v_hat[:, order]
    residual = float(np.linalg.norm(prep.a - (u_hat * d) @ v_hat.T))
    return SvdResult(d=d, u_hat=u_hat, v_hat=v_hat, residual=residual, trace=trace)


def run_svd(
    prep,
    weights,
    q_blocks: int | None = None,
    tie_mode: str = "independent",
    config: OptimizerConfig | None = None,
) -> SvdResult:
    """optimize + extract + restore, the full decomposition flow."""
    params, trace = optimize(prep, weights, q_blocks=q_blocks, tie_mode=tie_mode, config=config)
    result = extract(prep, weights, params, trace=trace)
    return matrix_core.restore_factors(result, prep)


def eigendecompose_psd(
    prep,
    weights,
    q_blocks: int | None = None,
    config: OptimizerConfig | None = None,
) -> SvdResult:
    """Tied-mode decomposition for symmetric positive semidefinite input.

    The returned u_hat and v_hat are the same matrix object and d holds the
    eigenvalue estimates of the working matrix.

    Validation runs on the original (padded) matrix. For a genuinely PSD
    input the pivot entry sits on the diagonal, so the pivoted working
    matrix inherits symmetry and the tied ansatz is the right model.
    """
    a = prep.padded_original()
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag)) > 1e-10:
            raise NotSymmetricPSDError("matrix has a genuinely complex part")
        a = a.real
    if np.max(np.abs(a - a.T)) > 1e-10:
        raise NotSymmetricPSDError("matrix is not symmetric within 1e-10")
    if float(np.min(np.linalg.eigvalsh(a))) < -1e-10:
        raise NotSymmetricPSDError("matrix has an eigenvalue below -1e-10")
    params, trace = optimize(prep, weights, q_blocks=q_blocks, tie_mode="tied", config=config)
    return extract(prep, weights, params, trace=trace)


def pseudoinverse(result: SvdResult, rank_tol: float = 1e-6) -> np.ndarray:
    """Moore-Penrose pseudoinverse from the extracted factors.

    Uses the restored singular values when the result has been mapped back
    to the original matrix, otherwise the working-matrix diagonal.
    """
    values = result.singular_values_original
    if values is None:
        values = result.d
    values = np.asarray(values, dtype=np.float64)
    top = float(values.max(initial=0.0))
    keep = values > rank_tol * top
    if top <= 0.0 or not np.any(keep):
        raise ZeroMatrixError("no diagonal value above the rank threshold")
    inv = np.zeros_like(values)
    inv[keep] = 1.0 / values[keep]
    return (result.v_hat * inv) @ np.conj(result.u_hat).T
