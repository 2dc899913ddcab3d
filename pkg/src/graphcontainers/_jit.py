"""JIT switch for the enumeration kernels.

Setting ``GRAPHCONTAINERS_DISABLE_JIT=1`` makes every kernel run as plain
Python over numpy arrays. The kernel sources are identical in both modes, and
the compiled dispatchers keep the original function on ``.py_func`` so tests
and the benchmark can run both paths side by side.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

JIT_DISABLED = os.environ.get("GRAPHCONTAINERS_DISABLE_JIT", "").strip().lower() not in _FALSY

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_JIT = numba is not None and not JIT_DISABLED


def njit(func):
    if USE_JIT:
        return numba.njit(cache=True, nogil=True)(func)
    func.py_func = func
    return func


def python_impl(kernel):
    """Return the uncompiled version of ``kernel``."""
    return getattr(kernel, "py_func", kernel)
