"""Numba gate kernels, the default execution path.

Same contracts as _numpy_backend. Loops run serially so results are bitwise
deterministic and match the numpy path to the last ulp (identical arithmetic
per amplitude, no reassociation; fastmath stays off).
"""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def ctrl_1q(amps, on_mask, off_mask, t_pos, u00, u01, u10, u11):
    t_mask = np.int64(1) << t_pos
    half = amps.size >> 1
    for p in range(half):
        i0 = ((p >> t_pos) << (t_pos + 1)) | (p & (t_mask - 1))
        if (i0 & on_mask) == on_mask and (i0 & off_mask) == 0:
            i1 = i0 | t_mask
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = u00 * a0 + u01 * a1
            amps[i1] = u10 * a0 + u11 * a1


@njit(cache=True)
def pattern_prob(amps, sel_mask, sel_val):
    total = 0.0
    for i in range(amps.size):
        if (i & sel_mask) == sel_val:
            a = amps[i]
            total += a.real * a.real + a.imag * a.imag
    return total


@njit(cache=True)
def project_renorm(amps, sel_mask, sel_val, scale):
    for i in range(amps.size):
        if (i & sel_mask) == sel_val:
            amps[i] = amps[i] * scale
        else:
            amps[i] = 0.0


@njit(cache=True)
def marginal_probs(amps, positions):
    k = positions.size
    out = np.zeros(1 << k, dtype=np.float64)
    for i in range(amps.size):
        pattern = 0
        for j in range(k):
            pattern |= ((i >> positions[j]) & 1) << (k - 1 - j)
        a = amps[i]
        out[pattern] += a.real * a.real + a.imag * a.imag
    return out
