"""Backend selection for the hot kernels.

Set ``CUBICMAPS_DISABLE_NUMBA=1`` to force the pure-numpy code paths.
Numba is also skipped silently when it cannot be imported.
"""
import os

_FLAG = os.environ.get("CUBICMAPS_DISABLE_NUMBA", "").strip().lower()

try:
    if _FLAG in ("1", "true", "yes", "on"):
        raise ImportError("disabled by CUBICMAPS_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
    # skip the TBB probe (and its version warning); OpenMP or the built-in pool is enough
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


prange = numba.prange if HAVE_NUMBA else range


def set_threads(n):
    """Set the numba worker count; returns the previous value (or None)."""
    if not HAVE_NUMBA:
        return None
    prev = numba.get_num_threads()
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return prev


def default_threads():
    env = os.environ.get("CUBICMAPS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"
