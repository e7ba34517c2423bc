"""Numba/numpy backend selection.

Hot kernels are compiled with numba unless the environment variable
DITSIM_NO_NUMBA is set to 1/true/yes, in which case vectorized
pure-numpy fallbacks are used throughout.  `benchmarks/bench_kernels.py`
compares the two paths.
"""
import os

_flag = os.environ.get("DITSIM_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in ("1", "true", "yes", "on")

if not NUMBA_DISABLED:
    try:
        import numba  # noqa: F401
        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def njit(*args, **kwargs):
    """numba.njit when active, identity decorator otherwise."""
    if USE_NUMBA:
        import numba
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
