"""Pure-Python kernel twin of the compiled extension.

Implements the exact same algorithms in the exact same operation order as
``_ckern.pyx`` (direct expansion for orders <= 3, partial-pivot elimination
above), so the two backends agree bit for bit.  Shape checking happens in
the callers; these functions assume well-formed float64 inputs.
"""
from __future__ import annotations

import numpy as np


def _det_inplace(u: np.ndarray, n: int) -> float:
    """Partial-pivot elimination determinant; destroys ``u``."""
    sign = 1.0
    for col in range(n - 1):
        piv = col
        mx = abs(u[col, col])
        for r in range(col + 1, n):
            v = abs(u[r, col])
            if v > mx:
                mx = v
                piv = r
        if mx == 0.0:
            return 0.0
        if piv != col:
            for c in range(col, n):
                tmp = u[piv, c]
                u[piv, c] = u[col, c]
                u[col, c] = tmp
            sign = -sign
        pv = u[col, col]
        for r in range(col + 1, n):
            f = u[r, col] / pv
            for c in range(col + 1, n):
                u[r, c] = u[r, c] - f * u[col, c]
    out = sign
    for i in range(n):
        out = out * u[i, i]
    return float(out)


def _det_any(u: np.ndarray, n: int) -> float:
    """Determinant of a scratch (writable) matrix; destroys ``u`` for n >= 4."""
    if n == 1:
        return float(u[0, 0])
    if n == 2:
        return float(u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0])
    if n == 3:
        return float(
            u[0, 0] * (u[1, 1] * u[2, 2] - u[1, 2] * u[2, 1])
            - u[0, 1] * (u[1, 0] * u[2, 2] - u[1, 2] * u[2, 0])
            + u[0, 2] * (u[1, 0] * u[2, 1] - u[1, 1] * u[2, 0])
        )
    return _det_inplace(u, n)


def det(a: np.ndarray) -> float:
    """Determinant of a square float64 matrix."""
    n = a.shape[0]
    if n <= 3:
        return _det_any(a, n)
    return _det_inplace(a.copy(), n)


def cofactor_matrix(a: np.ndarray) -> np.ndarray:
    """Signed cofactors: out[i, j] = (-1)^(i+j) det(a without row i, col j)."""
    n = a.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    if n == 1:
        out[0, 0] = 1.0
        return out
    if n == 2:
        out[0, 0] = a[1, 1]
        out[0, 1] = -a[1, 0]
        out[1, 0] = -a[0, 1]
        out[1, 1] = a[0, 0]
        return out
    sub = np.empty((n - 1, n - 1), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            r2 = 0
            for r in range(n):
                if r == i:
                    continue
                c2 = 0
                for c in range(n):
                    if c == j:
                        continue
                    sub[r2, c2] = a[r, c]
                    c2 += 1
                r2 += 1
            m = _det_any(sub, n - 1)
            out[i, j] = -m if (i + j) & 1 else m
    return out


def minor_dets(a: np.ndarray, row_sets: np.ndarray, col_sets: np.ndarray) -> np.ndarray:
    """Determinants of the submatrices a[row_sets[j], col_sets[i]].

    ``row_sets`` is (m, k) and ``col_sets`` is (l, k), both 0-based intp;
    the result is (l, m) with the column-set index major.
    """
    m = row_sets.shape[0]
    l = col_sets.shape[0]
    k = row_sets.shape[1]
    out = np.empty((l, m), dtype=np.float64)
    sub = np.empty((k, k), dtype=np.float64)
    for i in range(l):
        for j in range(m):
            for r in range(k):
                for c in range(k):
                    sub[r, c] = a[row_sets[j, r], col_sets[i, c]]
            out[i, j] = _det_any(sub, k)
    return out


def minor_gradient(a: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Gradient of the minor det(a[rows, cols]) with respect to every entry of a.

    Zero outside the selected rows/columns; inside, the signed (k-1)-cofactor
    within the selected submatrix.
    """
    n, kk = a.shape
    k = rows.shape[0]
    out = np.zeros((n, kk), dtype=np.float64)
    if k == 1:
        out[rows[0], cols[0]] = 1.0
        return out
    sub = np.empty((k - 1, k - 1), dtype=np.float64)
    for ai in range(k):
        for bi in range(k):
            r2 = 0
            for r in range(k):
                if r == ai:
                    continue
                c2 = 0
                for c in range(k):
                    if c == bi:
                        continue
                    sub[r2, c2] = a[rows[r], cols[c]]
                    c2 += 1
                r2 += 1
            m = _det_any(sub, k - 1)
            out[rows[ai], cols[bi]] = -m if (ai + bi) & 1 else m
    return out
