"""JIT switch for the numeric kernels.

Set ``SYMDYN_DISABLE_NUMBA=1`` to force the pure-numpy paths, e.g. when
debugging or on platforms without a working numba.
"""
import os

_DISABLED = os.environ.get("SYMDYN_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by SYMDYN_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
