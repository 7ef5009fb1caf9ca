"""Exact dense linear algebra over F_p on numpy int64 matrices."""

from __future__ import annotations

import numpy as np

from ._kernels import backend, rref
from .ffield import PrimeField

__all__ = [
    "backend",
    "as_matrix",
    "rref_copy",
    "rank",
    "nullspace",
    "solve",
    "matmul",
    "det",
    "mat_inv",
]

_INV_TABLES: dict[int, np.ndarray] = {}


def _inv_table(p: int) -> np.ndarray:
    t = _INV_TABLES.get(p)
    if t is None:
        t = PrimeField(p).inverse_table()
        _INV_TABLES[p] = t
    return t


def as_matrix(rows, p: int) -> np.ndarray:
    a = np.asarray(rows, dtype=np.int64) % p
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return np.ascontiguousarray(a)


def rref_copy(m: np.ndarray, p: int):
    a = np.array(m, dtype=np.int64, copy=True) % p
    a = np.ascontiguousarray(a)
    nr, piv = rref(a, p, _inv_table(p))
    return a, nr, piv


def rank(m: np.ndarray, p: int) -> int:
    return rref_copy(m, p)[1]


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of {v : M v = 0} as rows, in reduced echelon form.

    Deterministic: free columns in increasing order, pivot entries
    filled from the reduced echelon form of M.
    """
    m = np.asarray(m, dtype=np.int64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    cols = m.shape[1]
    if m.size == 0 or not m.any():
        return np.eye(cols, dtype=np.int64)
    a, r, piv = rref_copy(m, p)
    pivset = set(int(c) for c in piv)
    free = [c for c in range(cols) if c not in pivset]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(piv):
            basis[k, int(c)] = (-a[i, f]) % p
    return basis


def solve(m: np.ndarray, b: np.ndarray, p: int):
    """One solution x of M x = b, or None if inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64) % p
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    aug = np.hstack([m % p, b])
    a, r, piv = rref_copy(aug, p)
    cols = m.shape[1]
    for i in range(r):
        if piv[i] >= cols:
            return None
    x = np.zeros((cols, b.shape[1]), dtype=np.int64)
    for i in range(r):
        x[int(piv[i])] = a[i, cols:]
    return x


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) % p


def det(m: np.ndarray, p: int) -> int:
    """Determinant mod p by fraction-free elimination (small matrices)."""
    a = np.array(m, dtype=np.int64, copy=True) % p
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("det requires a square matrix")
    inv = _inv_table(p)
    d = 1
    for c in range(n):
        piv = -1
        for i in range(c, n):
            if a[i, c]:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            d = (-d) % p
        d = d * int(a[c, c]) % p
        v = int(inv[a[c, c]])
        a[c, c:] = a[c, c:] * v % p
        for i in range(c + 1, n):
            if a[i, c]:
                a[i, c:] = (a[i, c:] - a[i, c] * a[c, c:]) % p
    return d


def mat_inv(m: np.ndarray, p: int) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64) % p
    n = m.shape[0]
    aug = np.hstack([m, np.eye(n, dtype=np.int64)])
    a, r, piv = rref_copy(aug, p)
    if r < n or any(int(c) >= n for c in piv):
        raise ZeroDivisionError("matrix is singular mod p")
    return a[:, n:]
