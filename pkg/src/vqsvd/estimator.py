"""Objective recovery and derivatives.

The objective L(alpha, beta) = sum_l q_l Re[(b(alpha)^T a b(beta))_ll] comes
out of a probe through

    G^2 = a00t^2 / (2 p00)        L = a00t (p01 - p11) / (2 p00)

or straight from the dense circuit matrices (the `direct` route, used as the
independent cross-check of the circuit path).

Each free angle enters exactly one rotation gate, so L restricted to that
angle is u cos(angle/2) + v sin(angle/2) and the shifted evaluations

    dL/dg_k      = L(g_k + pi) / 2
    d2L/dg_k dg_m = L(g_k + pi, g_m + pi) / 4

are exact. A tied angle enters one rotation in each circuit copy; its
derivative is the chain-rule sum of the two single-copy shifts, evaluated
with the tie broken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzParams, ansatz_matrix
from .circuit import ProbeResult, probe_exact, probe_shots, reference_value
from .errors import DegenerateReferenceError, DimensionMismatchError, VanishingP00Error

EXACT_P00_FLOOR = 1e-9
REFERENCE_FLOOR = 1e-12

MODES = ("exact", "shots", "direct")


@dataclass
class ObjectiveSample:
    """One evaluation of the objective."""

    l_value: float
    g_squared: float
    source: str
    params_checksum: str = ""
    postselect_prob: float | None = None


def recover(probe: ProbeResult, p00_floor: float | None = None) -> ObjectiveSample:
    """Invert the readout probabilities into (L, G^2)."""
    if abs(probe.a00_tilde) < REFERENCE_FLOOR:
        raise DegenerateReferenceError(
            f"reference amplitude {probe.a00_tilde!r} too small to divide by"
        )
    if p00_floor is None:
        p00_floor = EXACT_P00_FLOOR if probe.mode == "exact" else 1.0 / (10.0 * probe.shots)
    if probe.p00 < p00_floor:
        raise VanishingP00Error(f"p00 = {probe.p00!r} below reliability floor {p00_floor!r}")
    g_squared = probe.a00_tilde**2 / (2.0 * probe.p00)
    l_value = probe.a00_tilde * (probe.p01 - probe.p11) / (2.0 * probe.p00)
    return ObjectiveSample(
        l_value=l_value,
        g_squared=g_squared,
        source=probe.mode,
        postselect_prob=probe.postselect_prob,
    )


def recover_standard_error(probe: ProbeResult) -> float:
    """Delta-method standard error of the recovered L for a shot probe."""
    if probe.mode != "shots":
        raise DimensionMismatchError("standard error is defined for shot probes only")
    sample = recover(probe)
    p = np.array([probe.p00, probe.p01, probe.p10, probe.p11])
    c = probe.a00_tilde / (2.0 * probe.p00)
    grad = np.array([-sample.l_value / probe.p00, c, 0.0, -c])
    cov = (np.diag(p) - np.outer(p, p)) / probe.shots
    var = float(grad @ cov @ grad)
    return float(np.sqrt(max(var, 0.0)))


def objective_direct(prep, weights, params: AnsatzParams) -> ObjectiveSample:
    """Evaluate L from the dense circuit matrices, no statevector involved."""
    if params.n != prep.n:
        raise DimensionMismatchError(f"params built for n={params.n}, matrix has n={prep.n}")
    if len(weights.q) != prep.dim:
        raise DimensionMismatchError(
            f"weight vector of length {len(weights.q)} does not match dim {prep.dim}"
        )
    b_alpha = ansatz_matrix(prep.n, params.alpha)
    b_beta = ansatz_matrix(prep.n, params.beta)
    diag = np.einsum("ij,ik,kj->j", b_alpha, prep.a, b_beta)
    l_tilde = complex(np.sum(weights.q * diag))
    ref = reference_value(prep, weights)
    g_squared = ref**2 + abs(l_tilde) ** 2
    return ObjectiveSample(
        l_value=l_tilde.real,
        g_squared=g_squared,
        source="direct",
        params_checksum=params.checksum(),
        postselect_prob=g_squared / 2 ** (3 * prep.n + 1),
    )


def evaluate(
    prep,
    weights,
    params: AnsatzParams,
    mode: str = "exact",
    shots: int | None = None,
    seed=None,
    sampling: str = "postselected",
) -> ObjectiveSample:
    """Evaluate L through the requested route."""
    if mode not in MODES:
        raise DimensionMismatchError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "direct":
        return objective_direct(prep, weights, params)
    if mode == "exact":
        probe = probe_exact(prep, weights, params)
    else:
        if shots is None:
            raise DimensionMismatchError("shots mode needs a shot count")
        probe = probe_shots(prep, weights, params, shots=shots, seed=seed, sampling=sampling)
    sample = recover(probe)
    sample.params_checksum = params.checksum()
    return sample


def _untied(params: AnsatzParams) -> AnsatzParams:
    """Independent-mode copy of a tied bank (both sides equal)."""
    return AnsatzParams(params.n, params.q_blocks, params.alpha, params.alpha.copy())


def _component_seeds(seed, count):
    if seed is None:
        return [None] * count
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def gradient(
    prep,
    weights,
    params: AnsatzParams,
    mode: str = "exact",
    shots: int | None = None,
    seed=None,
    sampling: str = "postselected",
) -> np.ndarray:
    """Parameter-shift gradient of L over the free angles."""
    ncomp = params.num_free

    def value(p, s):
        return evaluate(prep, weights, p, mode=mode, shots=shots, seed=s, sampling=sampling).l_value

    grad = np.zeros(ncomp)
    if params.tie_mode == "tied":
        half = ncomp
        base = _untied(params)
        seeds = _component_seeds(seed, 2 * ncomp)
        for k in range(ncomp):
            la = value(base.shifted(k, np.pi), seeds[2 * k])
            lb = value(base.shifted(half + k, np.pi), seeds[2 * k + 1])
            grad[k] = 0.5 * (la + lb)
        return grad
    seeds = _component_seeds(seed, ncomp)
    for k in range(ncomp):
        grad[k] = 0.5 * value(params.shifted(k, np.pi), seeds[k])
    return grad


def hessian_entry(
    prep,
    weights,
    params: AnsatzParams,
    k: int,
    m: int,
    mode: str = "exact",
    shots: int | None = None,
    seed=None,
    sampling: str = "postselected",
) -> float:
    """Parameter-shift second derivative d^2 L / dg_k dg_m."""

    def value(p, s=None):
        return evaluate(prep, weights, p, mode=mode, shots=shots, seed=s, sampling=sampling).l_value

    if params.tie_mode == "tied":
        half = params.num_free
        base = _untied(params)
        seeds = _component_seeds(seed, 4)
        total = 0.0
        for idx, (ka, mb) in enumerate(((k, m), (k, half + m), (half + k, m), (half + k, half + m))):
            total += value(base.shifted(ka, np.pi).shifted(mb, np.pi), seeds[idx])
        return 0.25 * total
    seeds = _component_seeds(seed, 1)
    return 0.25 * value(params.shifted(k, np.pi).shifted(m, np.pi), seeds[0])
