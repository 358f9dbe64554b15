"""Dense statevector engine over the fixed register bank.

The bank holds five n-qubit groups (r, c, chi, psi, q) followed by the single
qubits k, b, bt, 5n+3 qubits in total. The global basis index reads the
groups left to right with the most significant bit first; inside a group the
first qubit is that group's most significant bit. So bt occupies bit 0 of the
index, k bit 2, and the r group the top n bits.

Gates mutate the amplitude array in place. All gates used here have real 2x2
coefficient matrices, which is what the kernels implement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatchError,
    EmptySubsetError,
    ImpossibleOutcomeError,
    IndexOutOfRangeError,
    NormViolationError,
    NotGroundStateError,
    OverlappingQubitsError,
)

GROUPS = ("r", "c", "chi", "psi", "q")
OUTCOME_FLOOR = 1e-14

_SQ2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit numbering for the 5n+3 register bank."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise IndexOutOfRangeError(f"need at least one index qubit, got n={self.n}")

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def total_qubits(self) -> int:
        return 5 * self.n + 3

    @property
    def size(self) -> int:
        return 1 << self.total_qubits

    def group(self, name: str) -> list[int]:
        """Global qubit indices of an n-qubit group, most significant first."""
        offset = GROUPS.index(name) * self.n
        return list(range(offset, offset + self.n))

    @property
    def k(self) -> int:
        return 5 * self.n

    @property
    def b(self) -> int:
        return 5 * self.n + 1

    @property
    def bt(self) -> int:
        return 5 * self.n + 2

    def bit_pos(self, qubit: int) -> int:
        """Bit position (from the least significant end) of a global qubit."""
        return self.total_qubits - 1 - qubit

    @cached_property
    def _masks(self) -> np.ndarray:
        return np.array([1 << self.bit_pos(g) for g in range(self.total_qubits)], dtype=np.int64)

    def mask(self, qubit: int) -> int:
        return int(self._masks[qubit])

    def group_mask(self, name: str) -> int:
        m = 0
        for g in self.group(name):
            m |= self.mask(g)
        return m

    def index(self, r=0, c=0, chi=0, psi=0, q=0, k=0, b=0, bt=0) -> int:
        n = self.n
        for name, v in (("r", r), ("c", c), ("chi", chi), ("psi", psi), ("q", q)):
            if not 0 <= v < self.dim:
                raise IndexOutOfRangeError(f"{name}={v} outside [0, {self.dim})")
        for name, v in (("k", k), ("b", b), ("bt", bt)):
            if v not in (0, 1):
                raise IndexOutOfRangeError(f"{name}={v} is not a bit")
        return (
            (r << (4 * n + 3))
            | (c << (3 * n + 3))
            | (chi << (2 * n + 3))
            | (psi << (n + 3))
            | (q << 3)
            | (k << 2)
            | (b << 1)
            | bt
        )

    def decode(self, index: int) -> dict:
        n = self.n
        return {
            "r": (index >> (4 * n + 3)) & (self.dim - 1),
            "c": (index >> (3 * n + 3)) & (self.dim - 1),
            "chi": (index >> (2 * n + 3)) & (self.dim - 1),
            "psi": (index >> (n + 3)) & (self.dim - 1),
            "q": (index >> 3) & (self.dim - 1),
            "k": (index >> 2) & 1,
            "b": (index >> 1) & 1,
            "bt": index & 1,
        }

    def label(self, index: int) -> str:
        d = self.decode(index)
        return (
            f"r={d['r']} c={d['c']} chi={d['chi']} psi={d['psi']} q={d['q']} "
            f"k={d['k']} b={d['b']} bt={d['bt']}"
        )


@dataclass
class ShotCounts:
    """Measurement counts over a qubit subset, keyed by bit pattern."""

    counts: dict
    shots: int
    seed: object = None
    discarded: int = 0


class Statevector:
    """Mutable dense state over a RegisterLayout."""

    def __init__(self, layout: RegisterLayout, amps: np.ndarray | None = None):
        self.layout = layout
        if amps is None:
            amps = np.zeros(layout.size, dtype=np.complex128)
            amps[0] = 1.0
        else:
            if amps.shape != (layout.size,):
                raise DimensionMismatchError(
                    f"amplitude array of shape {amps.shape} does not fit {layout.size} states"
                )
            amps = np.ascontiguousarray(amps, dtype=np.complex128)
        self.amps = amps

    @classmethod
    def ground(cls, layout: RegisterLayout) -> "Statevector":
        return cls(layout)

    def copy(self) -> "Statevector":
        return Statevector(self.layout, self.amps.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.amps.real**2 + self.amps.imag**2)))

    def _check_qubit(self, qubit: int):
        if not 0 <= qubit < self.layout.total_qubits:
            raise IndexOutOfRangeError(
                f"qubit {qubit} outside [0, {self.layout.total_qubits})"
            )

    def _gate(self, qubit: int, u00, u01, u10, u11, on_mask=0, off_mask=0):
        self._check_qubit(qubit)
        kernels.ctrl_1q(
            self.amps, on_mask, off_mask, self.layout.bit_pos(qubit), u00, u01, u10, u11
        )

    def apply_h(self, qubit: int):
        self._gate(qubit, _SQ2, _SQ2, _SQ2, -_SQ2)
        return self

    def apply_x(self, qubit: int):
        self._gate(qubit, 0.0, 1.0, 1.0, 0.0)
        return self

    def apply_z(self, qubit: int):
        self._gate(qubit, 1.0, 0.0, 0.0, -1.0)
        return self

    def apply_ry(self, qubit: int, theta: float):
        c = math.cos(0.5 * theta)
        s = math.sin(0.5 * theta)
        self._gate(qubit, c, -s, s, c)
        return self

    def apply_mcx(self, controls, targets):
        """X on every target, applied where all controls match their polarity.

        `controls` is a sequence of (qubit, polarity) pairs; polarity 0 means
        the control fires on |0>. Targets and controls must be disjoint.
        """
        seen = set()
        on_mask = 0
        off_mask = 0
        for qubit, polarity in controls:
            self._check_qubit(qubit)
            if qubit in seen:
                raise OverlappingQubitsError(f"duplicate control qubit {qubit}")
            seen.add(qubit)
            if polarity not in (0, 1):
                raise IndexOutOfRangeError(f"polarity {polarity} is not a bit")
            if polarity:
                on_mask |= self.layout.mask(qubit)
            else:
                off_mask |= self.layout.mask(qubit)
        if not targets:
            raise EmptySubsetError("mcx needs at least one target")
        for t in targets:
            self._check_qubit(t)
            if t in seen:
                raise OverlappingQubitsError(f"qubit {t} is both control and target")
            seen.add(t)
        for t in targets:
            kernels.ctrl_1q(
                self.amps, on_mask, off_mask, self.layout.bit_pos(t), 0.0, 1.0, 1.0, 0.0
            )
        return self

    def apply_anticontrolled_z(self, control: int, target: int):
        """Z on the target wherever the control qubit is |0>."""
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise OverlappingQubitsError(f"control and target are both qubit {control}")
        kernels.ctrl_1q(
            self.amps,
            0,
            self.layout.mask(control),
            self.layout.bit_pos(target),
            1.0,
            0.0,
            0.0,
            -1.0,
        )
        return self

    def measure_postselect(self, qubit: int, outcome: int) -> float:
        """Project onto the given outcome and renormalize.

        Returns the outcome probability. Raises when that probability is
        numerically zero (below 1e-14).
        """
        self._check_qubit(qubit)
        if outcome not in (0, 1):
            raise IndexOutOfRangeError(f"outcome {outcome} is not a bit")
        mask = self.layout.mask(qubit)
        val = mask if outcome else 0
        prob = kernels.pattern_prob(self.amps, mask, val)
        if prob < OUTCOME_FLOOR:
            raise ImpossibleOutcomeError(
                f"outcome {outcome} on qubit {qubit} has probability {prob:.3e}"
            )
        kernels.project_renorm(self.amps, mask, val, 1.0 / math.sqrt(prob))
        return float(prob)

    def probabilities(self, qubits) -> np.ndarray:
        """Marginal distribution over `qubits`; first listed qubit is the MSB."""
        if len(qubits) == 0:
            raise EmptySubsetError("need at least one qubit to marginalize")
        if len(set(qubits)) != len(qubits):
            raise OverlappingQubitsError(f"duplicate qubits in {qubits}")
        for qb in qubits:
            self._check_qubit(qb)
        positions = np.array([self.layout.bit_pos(qb) for qb in qubits], dtype=np.int64)
        return kernels.marginal_probs(self.amps, positions)

    def sample(self, qubits, shots: int, seed=None) -> ShotCounts:
        """Draw independent shots from the marginal over `qubits`."""
        if shots < 1:
            raise EmptySubsetError(f"shots must be positive, got {shots}")
        probs = self.probabilities(qubits)
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()
        rng = np.random.default_rng(seed)
        draws = rng.multinomial(shots, probs)
        width = len(qubits)
        counts = {format(i, f"0{width}b"): int(c) for i, c in enumerate(draws) if c}
        return ShotCounts(counts=counts, shots=shots, seed=seed)

    def amplitude(self, index: int) -> complex:
        return complex(self.amps[index])

    def dump(self, threshold: float = 1e-9) -> list:
        """Nonzero amplitudes with decoded register labels, for debugging."""
        out = []
        for idx in np.nonzero(np.abs(self.amps) > threshold)[0]:
            out.append((self.layout.label(int(idx)), complex(self.amps[idx])))
        return out

    def load_product_state(self, prep, weights) -> "Statevector":
        """Load amplitude a[i,j] * q[m] at (r=i, c=j, q=m), everything else 0.

        Requires the ground state and unit-norm inputs.
        """
        lay = self.layout
        if prep.n != lay.n:
            raise DimensionMismatchError(f"matrix has n={prep.n}, register has n={lay.n}")
        if len(weights.q) != lay.dim:
            raise DimensionMismatchError(
                f"weight vector of length {len(weights.q)} does not match dim {lay.dim}"
            )
        if abs(self.amps[0] - 1.0) > 1e-12 or abs(self.norm() - 1.0) > 1e-12:
            raise NotGroundStateError("load_product_state requires the all-zero ground state")
        if abs(np.linalg.norm(prep.a) - 1.0) > 1e-9:
            raise NormViolationError("matrix is not Frobenius-normalized")
        if abs(np.linalg.norm(weights.q) - 1.0) > 1e-9:
            raise NormViolationError("weight vector is not normalized")
        d = lay.dim
        self.amps[0] = 0.0
        view = self.amps.reshape(d, d, d, d, d, 2, 2, 2)
        view[:, :, 0, 0, :, 0, 0, 0] = prep.a[:, :, None] * weights.q[None, None, :]
        return self
