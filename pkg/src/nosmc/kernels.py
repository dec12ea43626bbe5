"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``NOSMC_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py
from ._kernels_py import END, IDEAL, NONFINITE, REACHING, REENTRY, SLIDING, SMOOTH, TC

__all__ = ["run_segment", "run_pid", "BACKEND", "END", "TC", "REENTRY", "NONFINITE",
           "IDEAL", "SMOOTH", "REACHING", "SLIDING", "backend", "HAVE_COMPILED"]

try:
    from . import _kernels
    HAVE_COMPILED = True
except ImportError:
    _kernels = None
    HAVE_COMPILED = False

_impl = _kernels_py
BACKEND = "python"
if HAVE_COMPILED and os.environ.get("NOSMC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    _impl = _kernels
    BACKEND = "cython"

run_segment = _impl.run_segment
run_pid = _impl.run_pid


def backend(name):
    """Return the kernel module called ``name`` ("python" or "cython")."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        if not HAVE_COMPILED:
            raise ImportError("the compiled kernel extension is not built")
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")
