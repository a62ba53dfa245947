"""Optional numba acceleration.

Set ``BALLPOINCARE_NO_NUMBA=1`` to force the pure-numpy kernels.  When numba
is not importable the numpy path is used automatically.
"""
import os
import warnings

try:
    import numba
    from numba import njit, prange

    HAS_NUMBA = True
    # an outdated system TBB only means numba falls back to another threading layer
    warnings.filterwarnings("ignore", message="The TBB threading layer requires")
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def deco(f):
            return f

        return deco

    prange = range

ENV_FLAG = "BALLPOINCARE_NO_NUMBA"


def numba_requested():
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("", "0", "false", "no")


USE_NUMBA = HAS_NUMBA and numba_requested()


def jit(f):
    """Compile ``f`` in nopython mode with caching; identity without numba."""
    if not HAS_NUMBA:
        return f
    return njit(cache=True, parallel=True, fastmath=False)(f)
