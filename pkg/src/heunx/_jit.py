"""Backend selection for the hot kernels.

Kernels are compiled with numba unless HEUNX_NUMBA is set to 0/false/off
(or numba is missing), in which case the same functions run as plain
Python/numpy. `backend_name()` reports which path is active so benchmarks
and bug reports can state it.
"""

import os

_FLAG = os.environ.get("HEUNX_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "off", "no")

if _WANT_NUMBA:
    try:
        from numba import njit as _njit

        _HAVE_NUMBA = True
    except ImportError:
        print("heunx: numba not available, falling back to pure numpy kernels")
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

JIT_ENABLED = _WANT_NUMBA and _HAVE_NUMBA


def maybe_njit(func):
    """Compile with numba when the jit backend is active, else return as-is."""
    if JIT_ENABLED:
        return _njit(cache=True)(func)
    return func


def backend_name():
    return "numba" if JIT_ENABLED else "numpy"
