"""Block ansatz: per-block Ry rotations followed by a CNOT ladder.

Block k (k = 0..Q-1) consumes angles[k*n + j] for subsystem qubit j, applies
the rotations first, then CNOTs with control m and target m+1 for
m = 0..n-2, ascending. Blocks are applied in ascending k. All gates are real,
so the circuit matrix is orthogonal.

The controlled form replaces every rotation with the sandwich

    Ry(theta/2) . Cz . Ry(theta/2) . Cz       (rightmost factor first)

where Cz applies Z to the rotation qubit when the control qubit is |0>. On
the control-0 branch the two half-rotations cancel; on the control-1 branch
they compose to Ry(theta). The ladder CNOTs gain the control as a second
positive control.
"""

from __future__ import annotations

import hashlib
import math
from functools import lru_cache

import numpy as np

from .errors import IndexOutOfRangeError, WrongLengthError
from .statevector import Statevector

SUBSYSTEMS = ("chi", "psi")


def default_q_blocks(n: int) -> int:
    """Default block count: ceil(N^2 / n) for N = 2**n."""
    dim = 1 << n
    return -(-(dim * dim) // n)


class AnsatzParams:
    """Angle bank for both circuit copies.

    Independent mode keeps separate alpha and beta arrays (2nQ free angles);
    tied mode shares one array for both sides (nQ free angles).
    """

    def __init__(self, n, q_blocks, alpha, beta=None, tie_mode="independent"):
        if tie_mode not in ("independent", "tied"):
            raise IndexOutOfRangeError(f"unknown tie mode {tie_mode!r}")
        if q_blocks < 1:
            raise WrongLengthError(f"need at least one block, got {q_blocks}")
        expected = n * q_blocks
        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.shape != (expected,):
            raise WrongLengthError(f"alpha has {alpha.size} angles, expected {expected}")
        if tie_mode == "tied":
            if beta is not None:
                raise WrongLengthError("tied mode shares one angle bank; beta must be omitted")
        else:
            beta = np.asarray(beta, dtype=np.float64)
            if beta.shape != (expected,):
                raise WrongLengthError(f"beta has {beta.size} angles, expected {expected}")
        self.n = n
        self.q_blocks = q_blocks
        self.tie_mode = tie_mode
        self._alpha = alpha
        self._beta = beta

    @classmethod
    def zeros(cls, n, q_blocks, tie_mode="independent"):
        size = n * q_blocks
        if tie_mode == "tied":
            return cls(n, q_blocks, np.zeros(size), tie_mode=tie_mode)
        return cls(n, q_blocks, np.zeros(size), np.zeros(size))

    @classmethod
    def random_init(cls, n, q_blocks, scale, rng, tie_mode="independent"):
        """Uniform angles in [-scale, scale] radians."""
        size = n * q_blocks
        if tie_mode == "tied":
            return cls(n, q_blocks, rng.uniform(-scale, scale, size), tie_mode=tie_mode)
        return cls(
            n,
            q_blocks,
            rng.uniform(-scale, scale, size),
            rng.uniform(-scale, scale, size),
        )

    @property
    def alpha(self) -> np.ndarray:
        return self._alpha

    @property
    def beta(self) -> np.ndarray:
        return self._alpha if self.tie_mode == "tied" else self._beta

    @property
    def gamma(self) -> np.ndarray:
        """Free-parameter vector: alpha then beta, or just the shared bank."""
        if self.tie_mode == "tied":
            return self._alpha.copy()
        return np.concatenate([self._alpha, self._beta])

    @property
    def num_free(self) -> int:
        per_side = self.n * self.q_blocks
        return per_side if self.tie_mode == "tied" else 2 * per_side

    def with_gamma(self, gamma) -> "AnsatzParams":
        gamma = np.asarray(gamma, dtype=np.float64)
        if gamma.shape != (self.num_free,):
            raise WrongLengthError(f"gamma has {gamma.size} angles, expected {self.num_free}")
        half = self.n * self.q_blocks
        if self.tie_mode == "tied":
            return AnsatzParams(self.n, self.q_blocks, gamma, tie_mode="tied")
        return AnsatzParams(self.n, self.q_blocks, gamma[:half], gamma[half:])

    def shifted(self, k: int, delta: float) -> "AnsatzParams":
        """Copy with free angle k incremented by delta.

        In tied mode index k addresses the shared angle, so the shift lands
        on both circuit copies.
        """
        if not 0 <= k < self.num_free:
            raise IndexOutOfRangeError(f"parameter index {k} outside [0, {self.num_free})")
        gamma = self.gamma
        gamma[k] += delta
        return self.with_gamma(gamma)

    def checksum(self) -> str:
        payload = self.gamma.tobytes() + self.tie_mode.encode()
        return hashlib.sha1(payload).hexdigest()[:12]


def _check_angles(n, angles):
    angles = np.asarray(angles, dtype=np.float64)
    if angles.ndim != 1 or angles.size == 0 or angles.size % n:
        raise WrongLengthError(f"{angles.size} angles cannot fill blocks of {n} rotations")
    return angles


def apply_ansatz(state: Statevector, subsystem: str, angles) -> Statevector:
    """Run the block circuit on one n-qubit group of the register bank."""
    if subsystem not in SUBSYSTEMS:
        raise IndexOutOfRangeError(f"subsystem must be one of {SUBSYSTEMS}, got {subsystem!r}")
    n = state.layout.n
    angles = _check_angles(n, angles)
    qubits = state.layout.group(subsystem)
    for block in range(angles.size // n):
        for j in range(n):
            state.apply_ry(qubits[j], angles[block * n + j])
        for m in range(n - 1):
            state.apply_mcx([(qubits[m], 1)], [qubits[m + 1]])
    return state


def apply_controlled_ansatz(state: Statevector, subsystem: str, angles) -> Statevector:
    """Run the block circuit controlled on the k qubit, gate by gate."""
    if subsystem not in SUBSYSTEMS:
        raise IndexOutOfRangeError(f"subsystem must be one of {SUBSYSTEMS}, got {subsystem!r}")
    n = state.layout.n
    angles = _check_angles(n, angles)
    qubits = state.layout.group(subsystem)
    control = state.layout.k
    for block in range(angles.size // n):
        for j in range(n):
            half = 0.5 * angles[block * n + j]
            state.apply_anticontrolled_z(control, qubits[j])
            state.apply_ry(qubits[j], half)
            state.apply_anticontrolled_z(control, qubits[j])
            state.apply_ry(qubits[j], half)
        for m in range(n - 1):
            state.apply_mcx([(control, 1), (qubits[m], 1)], [qubits[m + 1]])
    return state


def _ry_matrix(theta: float) -> np.ndarray:
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    return np.array([[c, -s], [s, c]])


def _embed_1q(n: int, j: int, gate: np.ndarray) -> np.ndarray:
    left = np.eye(1 << j)
    right = np.eye(1 << (n - 1 - j))
    return np.kron(np.kron(left, gate), right)


@lru_cache(maxsize=None)
def _cnot_matrix(n: int, control: int, target: int) -> np.ndarray:
    dim = 1 << n
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    m = np.zeros((dim, dim))
    for col in range(dim):
        row = col ^ tbit if col & cbit else col
        m[row, col] = 1.0
    return m


def ansatz_matrix(n: int, angles) -> np.ndarray:
    """Dense N x N matrix of the block circuit on a standalone n-qubit group."""
    angles = _check_angles(n, angles)
    u = np.eye(1 << n)
    for block in range(angles.size // n):
        for j in range(n):
            u = _embed_1q(n, j, _ry_matrix(angles[block * n + j])) @ u
        for m in range(n - 1):
            u = _cnot_matrix(n, m, m + 1) @ u
    return u
