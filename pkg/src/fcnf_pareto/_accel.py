"""Optional numba acceleration.

Set ``FCNF_PARETO_NUMBA=0`` to run every kernel as plain numpy/Python.
numba is also skipped silently when it cannot be imported.
"""

from __future__ import annotations

import os

_flag = os.environ.get("FCNF_PARETO_NUMBA", "1").strip().lower()
_wanted = _flag not in ("0", "false", "no", "off")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_ENABLED = bool(_wanted and _numba is not None)


def njit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged."""
    if NUMBA_ENABLED:
        return _numba.njit(cache=True)(func)
    return func


def force_njit(func):
    """Always compile; used by the benchmark to compare both paths."""
    if _numba is None:
        raise RuntimeError("numba is not installed")
    return _numba.njit(cache=True)(func)
