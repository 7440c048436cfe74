"""Numba switch.

Set ``SPINANALOG_DISABLE_NUMBA=1`` before import to run every kernel as
plain Python/numpy. Missing numba degrades the same way.
"""
import os

DISABLE_ENV = "SPINANALOG_DISABLE_NUMBA"


def numba_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("", "0", "false", "no")


try:
    if numba_disabled():
        raise ImportError
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    _njit = None
    NUMBA_ENABLED = False


def jit(fn):
    if not NUMBA_ENABLED:
        return fn
    return _njit(cache=True)(fn)
