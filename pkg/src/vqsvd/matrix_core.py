"""Matrix intake: padding, pivoting, normalization, weight vectors.

A raw matrix M becomes the unit-Frobenius-norm working matrix

    a = exp(-i*phase) * (permuted zero-padded M) / scale

with the (0,0) entry real and nonnegative. The permutations, scale and phase
are recorded so factors found for `a` can be mapped back to M.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    AllZeroMatrixError,
    DimensionMismatchError,
    InvalidRankError,
    NonFiniteEntryError,
)

DEFAULT_PIVOT_TOL = 1e-6


@dataclass(frozen=True)
class PreparedMatrix:
    """Normalized working matrix plus the bookkeeping to undo preparation."""

    original: np.ndarray
    a: np.ndarray
    n: int
    scale: float
    phase: float
    row_perm: np.ndarray
    col_perm: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n

    def padded_original(self) -> np.ndarray:
        """Original matrix zero-padded into the top-left of an N x N block."""
        rows, cols = self.original.shape
        padded = np.zeros((self.dim, self.dim), dtype=self.original.dtype)
        padded[:rows, :cols] = self.original
        return padded

    def unprepare(self) -> np.ndarray:
        """Invert preparation: returns the zero-padded original matrix."""
        factor = _phase_factor(self.phase, np.isrealobj(self.a))
        permuted = self.scale * factor * self.a
        padded = np.empty_like(permuted)
        padded[np.ix_(self.row_perm, self.col_perm)] = permuted
        return padded


@dataclass(frozen=True)
class WeightVector:
    """Unit-norm weight vector with a strictly decreasing nonzero prefix."""

    q: np.ndarray
    t: int
    scheme: str


def _phase_factor(phase: float, real: bool):
    if real:
        # phase is exactly 0 or pi for real inputs; keep the arithmetic real
        return -1.0 if phase != 0.0 else 1.0
    return np.exp(1j * phase)


def prepare(matrix, pivot_tol: float = DEFAULT_PIVOT_TOL) -> PreparedMatrix:
    """Normalize a raw matrix into the unit-norm working form.

    Steps: zero-pad to the smallest N = 2**n >= max(rows, cols) with n >= 1,
    move a maximal-modulus entry to (0,0) when |m00| < pivot_tol * max|m_ij|,
    then divide out the Frobenius norm and the phase of the (0,0) entry.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.size == 0:
        raise DimensionMismatchError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteEntryError("matrix contains NaN or Inf entries")
    absm = np.abs(m)
    max_mod = float(absm.max())
    if max_mod < np.finfo(np.float64).eps:
        raise AllZeroMatrixError("every entry is below machine epsilon")

    real_input = not np.iscomplexobj(m)
    dtype = np.float64 if real_input else np.complex128
    original = m.astype(dtype)

    rows, cols = original.shape
    n = max(1, math.ceil(math.log2(max(rows, cols))))
    dim = 1 << n
    padded = np.zeros((dim, dim), dtype=dtype)
    padded[:rows, :cols] = original

    row_perm = np.arange(dim)
    col_perm = np.arange(dim)
    if abs(padded[0, 0]) < pivot_tol * max_mod:
        i_max, j_max = np.unravel_index(int(np.argmax(np.abs(padded))), padded.shape)
        row_perm[[0, i_max]] = row_perm[[i_max, 0]]
        col_perm[[0, j_max]] = col_perm[[j_max, 0]]
    permuted = padded[np.ix_(row_perm, col_perm)]

    scale = float(np.linalg.norm(padded))
    if real_input:
        phase = 0.0 if permuted[0, 0] >= 0 else math.pi
        a = permuted / scale if phase == 0.0 else -permuted / scale
    else:
        phase = float(np.angle(permuted[0, 0]))
        a = np.exp(-1j * phase) * permuted / scale

    return PreparedMatrix(
        original=original,
        a=a,
        n=n,
        scale=scale,
        phase=phase,
        row_perm=row_perm,
        col_perm=col_perm,
    )


def make_weights(n_dim: int, scheme: str = "linear", t: int | None = None) -> WeightVector:
    """Build the length-n_dim weight vector for truncation rank t.

    linear:    q_j proportional to (t - j) for j < t
    geometric: q_j proportional to (1/2)**j for j < t
    Entries at j >= t are exactly zero; the vector has unit norm.
    """
    if n_dim < 1:
        raise InvalidRankError(f"dimension must be positive, got {n_dim}")
    if t is None:
        t = n_dim
    if not 1 <= t <= n_dim:
        raise InvalidRankError(f"rank {t} outside [1, {n_dim}]")
    q = np.zeros(n_dim)
    j = np.arange(t, dtype=np.float64)
    if scheme == "linear":
        q[:t] = t - j
    elif scheme == "geometric":
        q[:t] = 0.5**j
    else:
        raise InvalidRankError(f"unknown weight scheme {scheme!r}")
    q /= np.linalg.norm(q)
    return WeightVector(q=q, t=t, scheme=scheme)


_COMPLEX_ENTRY = re.compile(r"\[([^\]]+)\]")


def load_matrix(path) -> np.ndarray:
    """Read a matrix file.

    Plain CSV (one row per line, comma separated) loads as real. A line like
    `[1.5, -2] [0, 1]` is read as complex entries given as [re, im] pairs;
    if every imaginary part is zero the result is demoted to real.
    """
    with open(path) as fh:
        text = fh.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DimensionMismatchError(f"{path}: empty matrix file")
    if "[" in text:
        rows = []
        for ln in lines:
            entries = _COMPLEX_ENTRY.findall(ln)
            if not entries:
                raise DimensionMismatchError(f"{path}: malformed complex row {ln!r}")
            row = []
            for entry in entries:
                parts = entry.split(",")
                if len(parts) != 2:
                    raise DimensionMismatchError(f"{path}: entry [{entry}] is not a [re, im] pair")
                row.append(complex(float(parts[0]), float(parts[1])))
            rows.append(row)
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise DimensionMismatchError(f"{path}: rows have inconsistent lengths {sorted(widths)}")
        m = np.array(rows, dtype=np.complex128)
        if not np.any(m.imag):
            return m.real.copy()
        return m
    try:
        m = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise DimensionMismatchError(f"{path}: not a readable CSV matrix ({exc})") from exc
    return m


def restore_factors(result, prep: PreparedMatrix):
    """Map factors of the working matrix back to the original.

    Rows of u_hat / v_hat are un-permuted, the removed phase is folded into
    u_hat, singular values are rescaled by `scale`, and the reconstruction
    residual is recomputed against the zero-padded original.
    """
    dim = prep.dim
    if result.u_hat.shape != (dim, dim) or result.v_hat.shape != (dim, dim):
        raise DimensionMismatchError(
            f"factor shapes {result.u_hat.shape}/{result.v_hat.shape} do not match dim {dim}"
        )
    if len(result.d) != dim:
        raise DimensionMismatchError(f"diagonal length {len(result.d)} does not match dim {dim}")
    factor = _phase_factor(prep.phase, np.isrealobj(prep.a))
    u_orig = np.empty(result.u_hat.shape, dtype=np.result_type(result.u_hat.dtype, type(factor)))
    u_orig[prep.row_perm, :] = factor * result.u_hat
    v_orig = np.empty_like(result.v_hat)
    v_orig[prep.col_perm, :] = result.v_hat
    sigma = prep.scale * result.d
    padded = prep.padded_original()
    residual = float(np.linalg.norm(padded - (u_orig * sigma) @ v_orig.T))
    return replace(
        result,
        u_hat=u_orig,
        v_hat=v_orig,
        singular_values_original=sigma,
        residual=residual,
    )
