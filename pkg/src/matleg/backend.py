"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the
pure-Python twin takes over transparently.  MATLEG_BACKEND=python or
MATLEG_BACKEND=compiled forces a choice (the latter raises if the
extension was never built).
"""
from __future__ import annotations

import os

from . import _pykern

_requested = os.environ.get("MATLEG_BACKEND", "").strip().lower()
if _requested not in ("", "compiled", "python"):
    raise ImportError(
        f"MATLEG_BACKEND must be 'compiled' or 'python', got {_requested!r}"
    )

if _requested == "python":
    _impl = _pykern
    BACKEND = "python"
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _pykern
        BACKEND = "python"

det = _impl.det
cofactor_matrix = _impl.cofactor_matrix
minor_dets = _impl.minor_dets
minor_gradient = _impl.minor_gradient


def kernel_backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
