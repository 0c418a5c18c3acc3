"""Hot numeric kernels: LCS table fill and damped power iteration.

Both kernels ship in two variants: a numba @njit build (default) and a
pure-numpy fallback. Set METAREV_NO_NUMBA=1 to force the numpy path; it is
also selected automatically when numba is not importable. The active
variant is reported by `backend()`. benchmarks/bench_kernels.py compares
the two.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("METAREV_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


def _lcs_length_numpy(a: np.ndarray, b: np.ndarray) -> int:
    # Row-wise DP. cur[j] = max(prev[j], prev[j-1] + eq, cur[j-1]); the
    # cur[j-1] dependency is resolved with a running maximum, so each row
    # is two vectorized passes instead of a scalar inner loop.
    prev = np.zeros(b.size + 1, dtype=np.int64)
    cur = np.zeros(b.size + 1, dtype=np.int64)
    for i in range(a.size):
        np.maximum(prev[1:], prev[:-1] + (b == a[i]), out=cur[1:])
        np.maximum.accumulate(cur, out=cur)
        prev, cur = cur, prev
    return int(prev[-1])


def _power_iteration_numpy(pt: np.ndarray, damping: float, tol: float, max_iter: int):
    # pt is the transpose of a row-stochastic transition matrix. Iterates
    # v <- damping * pt@v + (1-damping)/n until the L1 change drops below tol.
    n = pt.shape[0]
    v = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for it in range(1, max_iter + 1):
        nxt = damping * (pt @ v) + teleport * v.sum()
        nxt /= nxt.sum()
        if np.abs(nxt - v).sum() < tol:
            return nxt, it, True
        v = nxt
    return v, max_iter, False


_BACKEND = "numpy"
lcs_length = _lcs_length_numpy
power_iteration = _power_iteration_numpy

if not _FORCE_NUMPY:
    try:
        from numba import njit

        @njit(cache=True)
        def _lcs_length_numba(a, b):  # pragma: no cover - exercised via wrapper
            n = b.size
            prev = np.zeros(n + 1, dtype=np.int64)
            cur = np.zeros(n + 1, dtype=np.int64)
            for i in range(a.size):
                ai = a[i]
                for j in range(n):
                    best = prev[j + 1]
                    if cur[j] > best:
                        best = cur[j]
                    if ai == b[j]:
                        cand = prev[j] + 1
                        if cand > best:
                            best = cand
                    cur[j + 1] = best
                prev, cur = cur, prev
            return prev[n]

        @njit(cache=True)
        def _power_iteration_numba(pt, damping, tol, max_iter):  # pragma: no cover
            n = pt.shape[0]
            v = np.full(n, 1.0 / n)
            teleport = (1.0 - damping) / n
            for it in range(1, max_iter + 1):
                nxt = damping * np.dot(pt, v) + teleport * v.sum()
                nxt = nxt / nxt.sum()
                if np.abs(nxt - v).sum() < tol:
                    return nxt, it, True
                v = nxt
            return v, max_iter, False

        _BACKEND = "numba"
        lcs_length = _lcs_length_numba
        power_iteration = _power_iteration_numba
    except ImportError:  # numba missing: stay on the numpy path
        pass


def backend() -> str:
    """Name of the active kernel variant: 'numba' or 'numpy'."""
    return _BACKEND


def as_id_array(tokens, table: dict) -> np.ndarray:
    """Map hashable tokens to dense int64 ids, extending `table` in place."""
    out = np.empty(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        out[i] = table.setdefault(tok, len(table))
    return out
