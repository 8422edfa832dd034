"""Optional numba acceleration for the hot numeric kernels.

Every kernel in the package exists twice: a loop version compiled with
``numba.njit`` and a vectorised pure-numpy version.  Which one is used is
decided once, at import time:

* ``REGLAB_NO_NUMBA=1`` forces the numpy path;
* if numba cannot be imported the numpy path is used silently.

With the flag set, ``njit`` is the identity, so scalar kernels run as plain
Python.

Both paths are exercised by the test-suite and compared in
``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("REGLAB_NO_NUMBA", "").strip().lower()

try:  # pragma: no cover - depends on the environment
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")

njit_kwargs = {"cache": True, "nogil": True, "fastmath": False}


def njit(func):
    """Compile ``func`` with numba when available, else return it untouched.

    The undecorated function stays reachable as ``func.py_func`` in both
    cases so tests can run the exact same source interpreted.
    """
    if not USE_NUMBA:
        func.py_func = func
        return func
    return _numba.njit(**njit_kwargs)(func)


def select(numba_impl, numpy_impl):
    """Return the implementation chosen by the environment flag."""
    return numba_impl if USE_NUMBA else numpy_impl
