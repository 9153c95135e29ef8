"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the numpy
fallback is used. Set SIMADV_PURE_KERNELS=1 to force the fallback (useful
for the backend-parity tests and the benchmark).
"""
import os

from . import pure

if os.environ.get("SIMADV_PURE_KERNELS"):
    _impl = pure
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND

sq_dist = _impl.sq_dist
dot = _impl.dot
scaled_absmax = _impl.scaled_absmax
