"""Hot-loop kernels with a numba backend and a pure-numpy fallback.

The backend is picked once at import time. Set ``RECTIPLAN_BACKEND=numpy`` to
force the fallback; the default ``numba`` silently degrades to numpy when numba
is not importable.
"""

import os

from . import numpy_impl

BACKEND = os.environ.get("RECTIPLAN_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"RECTIPLAN_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

if BACKEND == "numba":
    try:
        from . import numba_impl as _impl
    except ImportError:  # pragma: no cover - numba is a declared dependency
        BACKEND = "numpy"
        _impl = numpy_impl
else:
    _impl = numpy_impl

pivot = _impl.pivot
enumerate_range = _impl.enumerate_range
rl_response = _impl.rl_response

__all__ = ["BACKEND", "pivot", "enumerate_range", "rl_response", "numpy_impl"]
