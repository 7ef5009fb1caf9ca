"""Hot linear-algebra kernels mod p: numba-jitted with a pure-numpy fallback.

The fallback is selected by setting the environment variable
MODINV_PURE_NUMPY=1 (or when numba is not importable).  Both paths
implement the same reduced-row-echelon transform and are compared
against each other in the test suite and in benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("MODINV_PURE_NUMPY", "").strip() in ("1", "true", "yes")

if not _FORCE_NUMPY:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

if not HAVE_NUMBA:

    def njit(*args, **kwargs):  # passthrough decorator
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def _mod_table(p: int) -> np.ndarray:
    """Lookup table for (v mod p) with v in [-(p-1)^2, p); avoids int64 idiv."""
    lo = -((p - 1) * (p - 1))
    vals = np.arange(lo, p, dtype=np.int64) % p
    return vals  # index with v - lo


@njit(cache=True, nogil=True)
def _rref_jit(a, p, inv_table, mod_table, lo):
    rows, cols = a.shape
    r = 0
    pivots = np.empty(cols, dtype=np.int64)
    npiv = 0
    for c in range(cols):
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        v = inv_table[a[r, c]]
        if v != 1:
            for j in range(c, cols):
                a[r, j] = a[r, j] * v % p
        for i in range(rows):
            f = a[i, c]
            if i != r and f != 0:
                for j in range(c, cols):
                    a[i, j] = mod_table[a[i, j] - f * a[r, j] - lo]
        pivots[npiv] = c
        npiv += 1
        r += 1
        if r == rows:
            break
    return npiv, pivots[:npiv]


def _rref_numpy(a, p, inv_table):
    rows, cols = a.shape
    r = 0
    pivots = []
    for c in range(cols):
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        v = int(inv_table[a[r, c]])
        if v != 1:
            a[r, c:] = a[r, c:] * v % p
        fac = a[:, c].copy()
        fac[r] = 0
        rows_nz = np.nonzero(fac)[0]
        if rows_nz.size:
            a[np.ix_(rows_nz, np.arange(c, cols))] -= np.outer(fac[rows_nz], a[r, c:])
            a[np.ix_(rows_nz, np.arange(c, cols))] %= p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return len(pivots), np.asarray(pivots, dtype=np.int64)


def rref(a: np.ndarray, p: int, inv_table: np.ndarray):
    """In-place reduced row echelon form of `a` mod p; returns (rank, pivot cols)."""
    if a.size == 0:
        return 0, np.zeros(0, dtype=np.int64)
    if HAVE_NUMBA:
        mt = _mod_table(p)
        lo = -((p - 1) * (p - 1))
        return _rref_jit(a, p, inv_table, mt, lo)
    return _rref_numpy(a, p, inv_table)
