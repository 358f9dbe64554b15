"""Classical reference decompositions, written independently of the
variational path on purpose: plane-rotation (Jacobi) methods only, no calls
into library SVD or eigensolvers.

One-sided Jacobi keeps W = A V exact at every step (rotations are applied
simultaneously to W and accumulated into V), so A = U Sigma V^T holds to
rounding regardless of sweep count; the off-diagonal Gram threshold only
controls how orthogonal U comes out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailureError, NonFiniteEntryError

GRAM_TOL = 1e-14
MAX_SWEEPS = 100
MAX_DIM = 64
ZERO_COLUMN_FLOOR = 1e-13


@dataclass
class OracleSvd:
    """Reference SVD: a = u @ diag(sigma) @ v.T, sigma descending."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    sweeps: int


def _check_input(a) -> np.ndarray:
    a = np.asarray(a)
    if np.iscomplexobj(a):
        raise ValueError("oracle decompositions take real matrices only")
    a = a.astype(np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"oracle limited to dimension {MAX_DIM}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntryError("matrix contains NaN or Inf entries")
    return a


def _complete_basis(u: np.ndarray, zero_cols) -> None:
    """Fill zero columns of u with unit vectors orthogonal to the rest."""
    dim = u.shape[0]
    filled = [j for j in range(dim) if j not in zero_cols]
    for j in zero_cols:
        for cand in range(dim):
            vec = np.zeros(dim)
            vec[cand] = 1.0
            for other in filled:
                vec -= (u[:, other] @ vec) * u[:, other]
            norm = np.linalg.norm(vec)
            if norm > 0.5:
                u[:, j] = vec / norm
                filled.append(j)
                break
        else:
            raise ConvergenceFailureError("could not complete an orthonormal basis")


def jacobi_svd(a, tol: float = GRAM_TOL, max_sweeps: int = MAX_SWEEPS) -> OracleSvd:
    """One-sided Jacobi SVD of a real square matrix."""
    a = _check_input(a)
    dim = a.shape[0]
    w = a.copy()
    v = np.eye(dim)
    sweeps = 0
    for sweep in range(1, max_sweeps + 1):
        sweeps = sweep
        worst = 0.0
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                app = w[:, p] @ w[:, p]
                aqq = w[:, q] @ w[:, q]
                apq = w[:, p] @ w[:, q]
                worst = max(worst, abs(apq))
                if abs(apq) <= tol:
                    continue
                theta = 0.5 * math.atan2(2.0 * apq, app - aqq)
                c = math.cos(theta)
                s = math.sin(theta)
                wp = c * w[:, p] + s * w[:, q]
                wq = -s * w[:, p] + c * w[:, q]
                w[:, p] = wp
                w[:, q] = wq
                vp = c * v[:, p] + s * v[:, q]
                vq = -s * v[:, p] + c * v[:, q]
                v[:, p] = vp
                v[:, q] = vq
        if worst <= tol:
            break
    else:
        raise ConvergenceFailureError(f"no convergence within {max_sweeps} sweeps")

    sigma = np.linalg.norm(w, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w = w[:, order]
    v = v[:, order]
    u = np.zeros_like(w)
    floor = ZERO_COLUMN_FLOOR * max(1.0, sigma[0] if dim else 1.0)
    zero_cols = []
    for j in range(dim):
        if sigma[j] > floor:
            u[:, j] = w[:, j] / sigma[j]
        else:
            zero_cols.append(j)
    if zero_cols:
        _complete_basis(u, zero_cols)
    return OracleSvd(u=u, sigma=sigma, v=v, sweeps=sweeps)


def jacobi_eigh(s, tol: float = GRAM_TOL, max_sweeps: int = MAX_SWEEPS):
    """Two-sided Jacobi eigendecomposition of a real symmetric matrix.

    Returns (eigenvalues descending, eigenvector columns).
    """
    s = _check_input(s)
    if np.max(np.abs(s - s.T)) > 1e-10 * max(1.0, float(np.max(np.abs(s)))):
        raise ValueError("jacobi_eigh needs a symmetric matrix")
    dim = s.shape[0]
    w = 0.5 * (s + s.T)
    v = np.eye(dim)
    for _ in range(max_sweeps):
        worst = 0.0
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                wpq = w[p, q]
                worst = max(worst, abs(wpq))
                if abs(wpq) <= tol:
                    continue
                theta = 0.5 * math.atan2(2.0 * wpq, w[q, q] - w[p, p])
                c = math.cos(theta)
                s_ = math.sin(theta)
                rot = np.eye(dim)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s_
                rot[q, p] = -s_
                w = rot.T @ w @ rot
                v = v @ rot
        if worst <= tol:
            break
    else:
        raise ConvergenceFailureError(f"no convergence within {max_sweeps} sweeps")
    evals = np.diag(w).copy()
    order = np.argsort(-evals, kind="stable")
    return evals[order], v[:, order]
