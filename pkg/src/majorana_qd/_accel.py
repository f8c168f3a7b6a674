"""Numba switch.

Set ``MAJORANA_QD_DISABLE_NUMBA=1`` to force the pure-numpy code paths.  The
flag is read once at import time; numba is also skipped when it cannot be
imported.
"""

import os

_flag = os.environ.get("MAJORANA_QD_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("disabled by MAJORANA_QD_DISABLE_NUMBA")
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def njit(func):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if HAVE_NUMBA:
        return _njit(cache=True)(func)
    return func


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
