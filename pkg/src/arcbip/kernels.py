"""Backend selection for the scalar kernels.

The compiled extension is used when it imports; set ``ARCBIP_PURE_PYTHON=1``
to force the pure-Python fallback.
"""
import os

from . import _kernels_py

if os.environ.get("ARCBIP_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

secular_root = _impl.secular_root
cubic_1d_min = _impl.cubic_1d_min
backtrack_factor = _impl.backtrack_factor


def available_backends():
    """Map backend name to kernel module for every backend that imports."""
    backends = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        backends["cython"] = _kernels
    return backends
