"""Kernel selection: compiled extension when importable, Python otherwise.

Set HERMTHETA_PURE=1 to force the pure-Python kernels.
"""
import os

from . import _pykernels

try:
    if os.environ.get("HERMTHETA_PURE"):
        raise ImportError("pure Python requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def get_kernels(backend: str | None = None):
    if backend is None:
        backend = BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if backend == "python":
        return _pykernels
    raise ValueError(f"unknown backend {backend!r}")
