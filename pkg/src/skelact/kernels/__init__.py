"""Alignment kernels: compiled core with a pure-Python fallback.

The dynamic-programming recurrence of DTW and the windowed scans of local
warping are the only Python-level hot loops in the pipeline, so they live
behind this tiny interface. At import time the compiled extension is
preferred; set ``SKELACT_PURE_PYTHON=1`` to force the fallback. Both
backends produce bit-identical outputs (same scalar operations in the same
order), so results never depend on which one loaded.
"""

import os

from . import _fallback

if os.environ.get("SKELACT_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

dtw_path = _impl.dtw_path
window_assign = _impl.window_assign


def available_backends() -> dict:
    """Name -> module for every importable backend (used by benchmarks/tests)."""
    backends = {"python": _fallback}
    try:
        from . import _native

        backends["native"] = _native
    except ImportError:
        pass
    return backends
