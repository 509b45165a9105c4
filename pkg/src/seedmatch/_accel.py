"""Backend switch for the hot kernels.

Kernels are written in the subset of Python that numba compiles. When numba
is importable and ``SEEDMATCH_DISABLE_NUMBA`` is unset (or "0"), they are
compiled with ``njit``; otherwise the plain-Python/numpy fallbacks are used.
The flag is read once, at import time.
"""
from __future__ import annotations

import os

_FLAG = "SEEDMATCH_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get(_FLAG, "0").strip().lower() in ("", "0", "false", "no")


def njit(func):
    """Compile ``func`` with numba when available, regardless of the flag.

    Callers that need both variants side by side (the benchmark, the
    backend-equivalence tests) keep the undecorated function around.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
