"""Numba acceleration toggle.

Hot numeric kernels are compiled with ``numba.njit`` when available.  Set the
environment variable ``CLUSTERREG_DISABLE_NUMBA=1`` before import to force the
pure-Python/numpy fallback paths (useful for debugging and for benchmarking
the two implementations against each other; see ``benchmarks/``).
"""

import os

NUMBA_DISABLED = os.environ.get("CLUSTERREG_DISABLE_NUMBA", "") == "1"

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via CLUSTERREG_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # noqa: ARG001 - mirrors numba's signature
        """No-op decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap
