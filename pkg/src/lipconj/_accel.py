"""Backend selection for the numeric kernels.

Set ``LIPCONJ_DISABLE_NUMBA=1`` to force the pure-numpy paths.
"""
import os

DISABLE_NUMBA = os.environ.get("LIPCONJ_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not DISABLE_NUMBA


def njit(fn):
    """Compile ``fn`` with numba when enabled; return it unchanged otherwise."""
    if not USE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
