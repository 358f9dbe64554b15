"""Exception types shared across the package."""


class VqsvdError(Exception):
    """Base class for all package errors."""


class AllZeroMatrixError(VqsvdError):
    """Input matrix has no entry above machine epsilon."""


class NonFiniteEntryError(VqsvdError):
    """Input matrix contains NaN or Inf."""


class InvalidRankError(VqsvdError):
    """Weight truncation rank outside [1, dimension]."""


class DimensionMismatchError(VqsvdError):
    """Operands disagree on register size or matrix shape."""


class NotGroundStateError(VqsvdError):
    """State loading requires the all-zero ground state."""


class NormViolationError(VqsvdError):
    """Input vector or matrix is not normalized."""


class IndexOutOfRangeError(VqsvdError):
    """Qubit or parameter index outside the valid range."""


class OverlappingQubitsError(VqsvdError):
    """Controls and targets of a gate must be distinct qubits."""


class ImpossibleOutcomeError(VqsvdError):
    """Requested measurement outcome has probability below 1e-14."""


class EmptySubsetError(VqsvdError):
    """Sampling requires a non-empty qubit subset."""


class WrongLengthError(VqsvdError):
    """Angle vector length does not match blocks * qubits."""


class PostselectionImpossibleError(VqsvdError):
    """The accepted branch is empty: reference amplitude and objective both vanish."""


class CalibrationMismatchError(VqsvdError):
    """Analytic reference amplitude disagrees with the simulated one."""


class DegenerateReferenceError(VqsvdError):
    """Reference amplitude is ~ 0; recovery would divide by zero."""


class VanishingP00Error(VqsvdError):
    """Reference outcome probability fell below the reliability floor."""


class NoSurvivingShotsError(VqsvdError):
    """Every shot failed post-selection in raw sampling mode."""


class NotSymmetricPSDError(VqsvdError):
    """Eigendecomposition mode needs a symmetric positive semidefinite matrix."""


class ZeroMatrixError(VqsvdError):
    """All diagonal values fall below the pseudoinverse rank threshold."""


class ConvergenceFailureError(VqsvdError):
    """Iterative routine exceeded its sweep budget."""


class NoProgressWarning(UserWarning):
    """Optimization ended below the trivial identity-parameter objective."""
