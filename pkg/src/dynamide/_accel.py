"""Optional numba acceleration.

Set ``DYNAMIDE_NO_NUMBA=1`` to force the pure-numpy kernels even when numba
is installed.  The flag is read once, at import time.
"""
import os

_DISABLED = os.environ.get("DYNAMIDE_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(fn):
    """Compile ``fn`` with numba in nopython mode, or return it untouched."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, fastmath=False)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
