"""Kernel backend selection.

The env var VQSVD_KERNELS picks the execution path:

    auto  (default) numba when importable, else numpy
    numba           require the jit kernels
    numpy           force the pure-numpy fallback

Both backends implement the same four primitives and agree to the last ulp;
`get_backend` exposes them individually for the equivalence tests and the
benchmark script.
"""

import os

from . import _numpy_backend

_ENV_VAR = "VQSVD_KERNELS"


def get_backend(name):
    """Return the kernel module for `name` ('numba' or 'numpy')."""
    if name == "numpy":
        return _numpy_backend
    if name == "numba":
        from . import _numba_backend

        return _numba_backend
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
    if choice == "auto":
        try:
            return get_backend("numba"), "numba"
        except ImportError:
            return _numpy_backend, "numpy"
    if choice in ("numba", "numpy"):
        return get_backend(choice), choice
    raise ValueError(f"{_ENV_VAR} must be 'numba', 'numpy' or 'auto', got {choice!r}")


_active, ACTIVE_BACKEND = _select()

ctrl_1q = _active.ctrl_1q
pattern_prob = _active.pattern_prob
project_renorm = _active.project_renorm
marginal_probs = _active.marginal_probs


def active_backend():
    """Name of the backend selected at import time."""
    return ACTIVE_BACKEND
