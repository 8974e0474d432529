"""Kernel selection: compiled extension when available, NumPy fallback.

Set GAUSSIANLINK_PURE_PYTHON=1 to force the fallback (used by the
benchmark and by tests comparing the two implementations).
"""

import os

from . import _kernel_py

if os.environ.get("GAUSSIANLINK_PURE_PYTHON", "") == "1":
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernel_py

BACKEND_NAME = _impl.BACKEND_NAME
slice_matrix = _impl.slice_matrix
cascade_matrix = _impl.cascade_matrix
reflectivity = _impl.reflectivity
reflectivity_from_cascade = _impl.reflectivity_from_cascade
sweep_optimize = _impl.sweep_optimize
