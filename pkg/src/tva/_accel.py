"""Numba switch.

Set ``TVA_NUMBA=0`` in the environment to force the pure-numpy kernels.
The flag is read once, at import time.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("TVA_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def njit(fn):
    """``numba.njit(cache=True)`` when numba is usable, identity otherwise."""
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)
