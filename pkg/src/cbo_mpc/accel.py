"""Numba acceleration switch.

Hot kernels in :mod:`cbo_mpc.kernels` come in two flavors: a numba
``@njit`` loop version and a vectorized pure-numpy version.  The numba
path is used whenever numba imports cleanly, unless the environment
variable ``CBO_MPC_NO_NUMBA`` is set to ``1``/``true``/``yes``, in which
case the numpy fallback is selected.  ``benchmarks/bench_kernels.py``
compares the two.
"""

import os


def _flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes")


NUMBA_DISABLED = _flag("CBO_MPC_NO_NUMBA")

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via CBO_MPC_NO_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        """No-op stand-in so kernel modules import without numba."""

        def decorator(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return decorator


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if NUMBA_ENABLED else "numpy"
