"""Backend selection for the cipher kernels.

Every hot kernel exists twice: a per-block loop compiled with numba's
``@njit`` and a vectorised pure-numpy version that processes all blocks of a
workload at once. Setting ``UNIBENCH_DISABLE_NUMBA=1`` (or running without
numba installed) makes the numpy path the default.
"""

import os

BACKENDS = ("numba", "numpy")

_disabled = os.environ.get("UNIBENCH_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by UNIBENCH_DISABLE_NUMBA")
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:
    _numba_njit = None
    HAVE_NUMBA = False


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if _numba_njit is None:
        return func
    return _numba_njit(cache=True, nogil=True)(func)


DEFAULT_BACKEND = "numba" if HAVE_NUMBA else "numpy"


def resolve_backend(backend=None):
    if backend is None:
        return DEFAULT_BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    return backend
