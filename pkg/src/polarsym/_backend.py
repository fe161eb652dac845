"""Backend selection for the hot kernels.

``POLARSYM_BACKEND=numpy`` forces the pure-numpy code paths; the default is
numba when it imports cleanly. ``POLARSYM_THREADS`` caps numba's thread pool.
"""
import os
import warnings

_requested = os.environ.get("POLARSYM_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"POLARSYM_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

HAVE_NUMBA = False
try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    prange = range

    def njit(*args, **kw):
        if len(args) == 1 and callable(args[0]) and not kw:
            return args[0]
        return lambda f: f

USE_NUMBA = HAVE_NUMBA and _requested == "numba"
if _requested == "numba" and not HAVE_NUMBA:  # pragma: no cover
    warnings.warn("numba is not installed - falling back to numpy kernels")

if HAVE_NUMBA:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe; workqueue ships with numba everywhere
        numba.config.THREADING_LAYER = "workqueue"
    _threads = os.environ.get("POLARSYM_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
