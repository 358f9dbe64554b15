"""Pure-numpy gate kernels.

Fallback path selected with VQSVD_KERNELS=numpy. Semantics match the numba
backend exactly; every function mutates the amplitude array in place unless
it returns a value.
"""

import numpy as np

NAME = "numpy"


def ctrl_1q(amps, on_mask, off_mask, t_pos, u00, u01, u10, u11):
    """Apply a real 2x2 gate to the target bit at position t_pos.

    The gate acts only on basis-state pairs whose index has every on_mask
    bit set and every off_mask bit clear. With both masks zero this is a
    plain single-qubit gate.
    """
    t_mask = 1 << t_pos
    if on_mask == 0 and off_mask == 0:
        view = amps.reshape(-1, 2, t_mask)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = u00 * a0 + u01 * a1
        view[:, 1, :] = u10 * a0 + u11 * a1
        return
    pairs = np.arange(amps.size >> 1, dtype=np.int64)
    i0 = ((pairs >> t_pos) << (t_pos + 1)) | (pairs & (t_mask - 1))
    sel = (i0 & on_mask) == on_mask
    if off_mask:
        sel &= (i0 & off_mask) == 0
    i0 = i0[sel]
    i1 = i0 | t_mask
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = u00 * a0 + u01 * a1
    amps[i1] = u10 * a0 + u11 * a1


def pattern_prob(amps, sel_mask, sel_val):
    """Total probability of basis states with (index & sel_mask) == sel_val."""
    idx = np.arange(amps.size, dtype=np.int64)
    a = amps[(idx & sel_mask) == sel_val]
    return float(np.sum(a.real * a.real + a.imag * a.imag))


def project_renorm(amps, sel_mask, sel_val, scale):
    """Zero out non-matching basis states and rescale the matching ones."""
    idx = np.arange(amps.size, dtype=np.int64)
    keep = (idx & sel_mask) == sel_val
    amps[~keep] = 0.0
    amps[keep] *= scale


def marginal_probs(amps, positions):
    """Marginal distribution over the bits at `positions` (pattern MSB first)."""
    k = len(positions)
    idx = np.arange(amps.size, dtype=np.int64)
    pattern = np.zeros(amps.size, dtype=np.int64)
    for i in range(k):
        pattern |= ((idx >> int(positions[i])) & 1) << (k - 1 - i)
    weights = amps.real * amps.real + amps.imag * amps.imag
    return np.bincount(pattern, weights=weights, minlength=1 << k)
