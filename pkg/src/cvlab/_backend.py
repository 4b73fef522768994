"""Selection between numba-compiled kernels and the plain numpy path.

Set ``CVLAB_DISABLE_NUMBA=1`` in the environment before importing
:mod:`cvlab` to run every kernel as ordinary Python/numpy.  The kernels are
written once; :func:`jit` either compiles them with ``numba.njit`` or hands
them back untouched.
"""

from __future__ import annotations

import os

_FLAG = "CVLAB_DISABLE_NUMBA"

NUMBA_REQUESTED = os.environ.get(_FLAG, "0").strip().lower() not in ("1", "true", "yes", "on")

try:
    if not NUMBA_REQUESTED:
        raise ImportError("disabled by " + _FLAG)
    import numba as _numba

    USE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None
    USE_NUMBA = False


def jit(fn=None, *, cache=True):
    """Compile ``fn`` in nopython mode when numba is active.

    Functions that receive other compiled functions as arguments cannot be
    cached across processes; pass ``cache=False`` for those.
    """
    if fn is None:
        return lambda f: jit(f, cache=cache)
    if USE_NUMBA:
        return _numba.njit(cache=cache)(fn)
    return fn


def is_compiled(fn) -> bool:
    """True when ``fn`` is a numba dispatcher (and can be passed into jitted code)."""
    if not USE_NUMBA:
        return False
    from numba.core.registry import CPUDispatcher

    return isinstance(fn, CPUDispatcher)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
