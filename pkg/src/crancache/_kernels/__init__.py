"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set CRANCACHE_PURE_PYTHON=1 to force the fallback (used by the benchmark and
the parity tests).
"""
import os

from . import _fallback

if os.environ.get("CRANCACHE_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

backend = _impl.BACKEND
cycle_drive = _impl.cycle_drive
lms_run = _impl.lms_run

__all__ = ["backend", "cycle_drive", "lms_run"]
