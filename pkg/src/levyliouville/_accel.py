"""Backend selection for the hot numerical kernels.

Set ``LEVYLIOUVILLE_BACKEND=numpy`` to force the pure-numpy path, ``numba``
to require numba.  The default uses numba when it imports cleanly.
"""
import os

_requested = os.environ.get("LEVYLIOUVILLE_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(f"LEVYLIOUVILLE_BACKEND must be auto, numba or numpy, got {_requested!r}")

try:
    if _requested == "numpy":
        raise ImportError
    import numba

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the TBB layer warns on older TBB builds; the work-queue layer is always present
        numba.config.THREADING_LAYER = "workqueue"
    HAVE_NUMBA = True
except ImportError:
    if _requested == "numba":
        raise
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise."""
    kwargs.setdefault("cache", True)

    def wrap(fn):
        if HAVE_NUMBA:
            return numba.njit(**kwargs)(fn)
        return fn

    if len(args) == 1 and callable(args[0]):
        return wrap(args[0])
    return wrap


def set_num_threads(n):
    if HAVE_NUMBA and n and n > 0:
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))


if HAVE_NUMBA:
    prange = numba.prange
else:
    prange = range
