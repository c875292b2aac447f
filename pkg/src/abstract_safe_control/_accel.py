"""Numba/numpy backend selection for the hot kernels.

The numeric inner loops in :mod:`abstract_safe_control.kernels` are written in
loop-style numpy so the same source runs either JIT-compiled (numba) or as
plain Python.  Selection happens once at import time:

* ``ASC_BACKEND=numba`` (default when numba is importable) compiles kernels
  with ``@njit(cache=True)``.
* ``ASC_BACKEND=numpy`` runs the same functions uncompiled.  Slow, but has no
  compile latency and works without numba installed.

Compiled kernels keep their pure-Python twin on the ``.py_func`` attribute,
which is what the benchmark and the backend-equivalence tests use.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via ASC_BACKEND=numpy
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("ASC_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"ASC_BACKEND={_requested!r} not understood (expected 'numba' or 'numpy')"
    )
if _requested == "numba" and not HAVE_NUMBA:
    raise RuntimeError("ASC_BACKEND=numba requested but numba is not importable")

USE_NUMBA = (_requested == "numba") or (_requested == "" and HAVE_NUMBA)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def jit(func):
    """Apply ``numba.njit(cache=True)`` when the numba backend is active."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def plain(func):
    """Return the uncompiled version of a (possibly jitted) kernel."""
    return getattr(func, "py_func", func)
