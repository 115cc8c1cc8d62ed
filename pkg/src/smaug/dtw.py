"""Dynamic time warping distance with absolute-difference cost."""
from __future__ import annotations

import numpy as np

from .errors import EmptySequence

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _dtw_kernel(a: np.ndarray, b: np.ndarray) -> float:
    n = a.shape[0]
    m = b.shape[0]
    prev = np.empty(m + 1, dtype=np.float64)
    cur = np.empty(m + 1, dtype=np.float64)
    prev[0] = 0.0
    for j in range(1, m + 1):
        prev[j] = np.inf
    for i in range(1, n + 1):
        cur[0] = np.inf
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = abs(ai - b[j - 1]) + best
        prev, cur = cur, prev
    return prev[m]


def dtw(a, b) -> float:
    """Distance between two real sequences; 0 for equal sequences.

    Uses the unconstrained recurrence with a two-row rolling table, so
    memory is O(min over a full table) while results match the textbook
    full-table formulation exactly.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptySequence("dtw requires non-empty sequences")
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("dtw operates on scalar sequences")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("dtw requires finite values")
    return float(_dtw_kernel(a, b))
