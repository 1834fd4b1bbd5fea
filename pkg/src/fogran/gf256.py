"""GF(256) arithmetic (primitive polynomial 0x11B) with table-driven numpy
kernels and plain Gaussian elimination for the small dense systems the cache
simulator solves."""

from __future__ import annotations

import numpy as np

POLY = 0x11B

_EXP = np.zeros(512, dtype=np.uint8)
_LOG = np.zeros(256, dtype=np.int64)
_x = 1
for _i in range(255):
    _EXP[_i] = _x
    _LOG[_x] = _i
    # advance by the generator 3 = x + 1 (2 is not primitive for 0x11B)
    _dbl = _x << 1
    if _dbl & 0x100:
        _dbl ^= POLY
    _x = _dbl ^ _x
for _i in range(255, 510):
    _EXP[_i] = _EXP[_i - 255]


def mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return int(_EXP[_LOG[a] + _LOG[b]])


def inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 in GF(256)")
    return int(_EXP[255 - _LOG[a]])


def scale(vec: np.ndarray, s: int) -> np.ndarray:
    """s * vec elementwise."""
    if s == 0:
        return np.zeros_like(vec)
    if s == 1:
        return vec.copy()
    out = _EXP[_LOG[vec] + _LOG[s]]
    out[vec == 0] = 0
    return out


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product over GF(256); A is (m, n), B is (n,) or (n, k)."""
    if B.shape[0] == 0:
        return np.zeros((A.shape[0],) + B.shape[1:], dtype=np.uint8)
    b2 = B.reshape(B.shape[0], -1)
    out = np.zeros((A.shape[0], b2.shape[1]), dtype=np.uint8)
    for j in range(A.shape[1]):
        col = A[:, j]
        if not col.any():
            continue
        row = b2[j]
        if not row.any():
            continue
        prod = _EXP[_LOG[col][:, None] + _LOG[row][None, :]]
        prod[col == 0, :] = 0
        prod[:, row == 0] = 0
        out ^= prod
    return out.reshape((A.shape[0],) + B.shape[1:])


def rank(A: np.ndarray) -> int:
    A = A.copy()
    m, n = A.shape
    r = 0
    for col in range(n):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if A[i, col]:
                piv = i
                break
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = scale(A[r], inv(int(A[r, col])))
        mask = A[:, col] != 0
        mask[r] = False
        if mask.any():
            A[mask] ^= _mul_outer(A[mask, col], A[r])
        r += 1
    return r


def _mul_outer(scalars: np.ndarray, row: np.ndarray) -> np.ndarray:
    out = _EXP[_LOG[scalars][:, None] + _LOG[row][None, :]]
    out[scalars == 0, :] = 0
    out[:, row == 0] = 0
    return out


def solve(A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Solve A x = b for a uniquely determined x (square or overdetermined
    consistent system); returns None when the system is rank deficient."""
    m, n = A.shape
    if m < n:
        return None
    aug = np.concatenate([A, b.reshape(m, -1)], axis=1).astype(np.uint8)
    r = 0
    pivots = []
    for col in range(n):
        piv = None
        for i in range(r, m):
            if aug[i, col]:
                piv = i
                break
        if piv is None:
            return None
        aug[[r, piv]] = aug[[piv, r]]
        aug[r] = scale(aug[r], inv(int(aug[r, col])))
        mask = aug[:, col] != 0
        mask[r] = False
        if mask.any():
            aug[mask] ^= _mul_outer(aug[mask, col], aug[r])
        pivots.append(col)
        r += 1
    if aug[r:, n:].any():
        return None  # inconsistent tail rows
    sol = aug[:n, n:]
    return sol.reshape((n,) + b.shape[1:])


def random_matrix(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 256, size=(rows, cols), dtype=np.uint8)
