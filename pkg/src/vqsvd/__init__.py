"""Exact-simulation laboratory for variational quantum singular value
decomposition: amplitude-encode a matrix, run the weighted-trace circuit on
a dense statevector, recover the objective from four probabilities, and
climb it with parameter-shift gradients.
"""

from .ansatz import AnsatzParams, ansatz_matrix, apply_ansatz, default_q_blocks
from .circuit import (
    ProbeResult,
    calibrate_reference,
    probe_exact,
    probe_shots,
    reference_value,
    run_pipeline,
)
from .driver import (
    OptimizationTrace,
    OptimizerConfig,
    SvdResult,
    eigendecompose_psd,
    extract,
    optimize,
    pseudoinverse,
    run_svd,
)
from .errors import (
    CalibrationMismatchError,
    ConvergenceFailureError,
    DegenerateReferenceError,
    NoProgressWarning,
    NotSymmetricPSDError,
    PostselectionImpossibleError,
    VqsvdError,
    ZeroMatrixError,
)
from .estimator import (
    ObjectiveSample,
    evaluate,
    gradient,
    hessian_entry,
    objective_direct,
    recover,
    recover_standard_error,
)
from .matrix_core import (
    PreparedMatrix,
    WeightVector,
    load_matrix,
    make_weights,
    prepare,
    restore_factors,
)
from .oracle import OracleSvd, jacobi_eigh, jacobi_svd
from .statevector import RegisterLayout, ShotCounts, Statevector

__version__ = "0.1.0"

__all__ = [
    "AnsatzParams",
    "CalibrationMismatchError",
    "ConvergenceFailureError",
    "DegenerateReferenceError",
    "NoProgressWarning",
    "NotSymmetricPSDError",
    "ObjectiveSample",
    "OptimizationTrace",
    "OptimizerConfig",
    "OracleSvd",
    "PostselectionImpossibleError",
    "PreparedMatrix",
    "ProbeResult",
    "RegisterLayout",
    "ShotCounts",
    "Statevector",
    "SvdResult",
    "VqsvdError",
    "WeightVector",
    "ZeroMatrixError",
    "ansatz_matrix",
    "apply_ansatz",
    "calibrate_reference",
    "default_q_blocks",
    "eigendecompose_psd",
    "evaluate",
    "extract",
    "gradient",
    "hessian_entry",
    "jacobi_eigh",
    "jacobi_svd",
    "load_matrix",
    "make_weights",
    "objective_direct",
    "optimize",
    "prepare",
    "probe_exact",
    "probe_shots",
    "pseudoinverse",
    "recover",
    "recover_standard_error",
    "reference_value",
    "restore_factors",
    "run_pipeline",
    "run_svd",
    "__version__",
]
