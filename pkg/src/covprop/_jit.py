"""numba shim.

Set ``COVPROP_DISABLE_JIT=1`` to route every hot kernel through its pure
numpy/Python fallback (also used automatically when numba is missing or when
integer-scaled inputs would overflow int64).
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("COVPROP_DISABLE_JIT", "").strip().lower()
DISABLE_JIT = _FLAG in {"1", "true", "yes", "on"}

try:
    if DISABLE_JIT:
        raise ImportError("jit disabled by COVPROP_DISABLE_JIT")
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    _numba_njit = None

JIT_ENABLED = HAVE_NUMBA and not DISABLE_JIT


def njit(func=None, **kwargs):
    """``numba.njit`` when enabled, otherwise the identity decorator."""
    if not JIT_ENABLED:
        if func is not None:
            return func
        return lambda f: f
    if func is not None:
        return _numba_njit(**kwargs)(func) if kwargs else _numba_njit(func)
    return _numba_njit(**kwargs)


__all__ = ["njit", "JIT_ENABLED", "HAVE_NUMBA", "DISABLE_JIT"]
