# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for small dense matrices.

Mirrors ``_pykern`` operation for operation (direct expansion for orders
<= 3, partial-pivot elimination above); built with -ffp-contract=off so
both backends return bit-identical doubles.
"""
from libc.math cimport fabs

import numpy as np


cdef double _det_inplace(double[:, ::1] u, Py_ssize_t n) noexcept:
    cdef double sign = 1.0
    cdef double mx, v, pv, f, tmp, out
    cdef Py_ssize_t col, piv, r, c, i
    for col in range(n - 1):
        piv = col
        mx = fabs(u[col, col])
        for r in range(col + 1, n):
            v = fabs(u[r, col])
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
    return out


cdef double _det_any(double[:, ::1] u, Py_ssize_t n) noexcept:
    # determinant of a scratch matrix; destroys u for n >= 4
    if n == 1:
        return u[0, 0]
    if n == 2:
        return u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    if n == 3:
        return (u[0, 0] * (u[1, 1] * u[2, 2] - u[1, 2] * u[2, 1])
                - u[0, 1] * (u[1, 0] * u[2, 2] - u[1, 2] * u[2, 0])
                + u[0, 2] * (u[1, 0] * u[2, 1] - u[1, 1] * u[2, 0]))
    return _det_inplace(u, n)


def det(const double[:, ::1] a):
    """Determinant of a square float64 matrix."""
    cdef Py_ssize_t n = a.shape[0]
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if n == 3:
        return (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
                - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
                + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))
    u_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] u = u_arr
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            u[i, j] = a[i, j]
    return _det_inplace(u, n)


def cofactor_matrix(const double[:, ::1] a):
    """Signed cofactors: out[i, j] = (-1)^(i+j) det(a without row i, col j)."""
    cdef Py_ssize_t n = a.shape[0]
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    if n == 1:
        out[0, 0] = 1.0
        return out_arr
    if n == 2:
        out[0, 0] = a[1, 1]
        out[0, 1] = -a[1, 0]
        out[1, 0] = -a[0, 1]
        out[1, 1] = a[0, 0]
        return out_arr
    sub_arr = np.empty((n - 1, n - 1), dtype=np.float64)
    cdef double[:, ::1] sub = sub_arr
    cdef Py_ssize_t i, j, r, c, r2, c2
    cdef double m
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
    return out_arr


def minor_dets(const double[:, ::1] a,
               const Py_ssize_t[:, ::1] row_sets,
               const Py_ssize_t[:, ::1] col_sets):
    """Determinants of the submatrices a[row_sets[j], col_sets[i]], shape (l, m)."""
    cdef Py_ssize_t m = row_sets.shape[0]
    cdef Py_ssize_t l = col_sets.shape[0]
    cdef Py_ssize_t k = row_sets.shape[1]
    out_arr = np.empty((l, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    sub_arr = np.empty((k, k), dtype=np.float64)
    cdef double[:, ::1] sub = sub_arr
    cdef Py_ssize_t i, j, r, c
    for i in range(l):
        for j in range(m):
            for r in range(k):
                for c in range(k):
                    sub[r, c] = a[row_sets[j, r], col_sets[i, c]]
            out[i, j] = _det_any(sub, k)
    return out_arr


def minor_gradient(const double[:, ::1] a,
                   const Py_ssize_t[::1] rows,
                   const Py_ssize_t[::1] cols):
    """Gradient of det(a[rows, cols]) with respect to every entry of a."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t kk = a.shape[1]
    cdef Py_ssize_t k = rows.shape[0]
    out_arr = np.zeros((n, kk), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    if k == 1:
        out[rows[0], cols[0]] = 1.0
        return out_arr
    sub_arr = np.empty((k - 1, k - 1), dtype=np.float64)
    cdef double[:, ::1] sub = sub_arr
    cdef Py_ssize_t ai, bi, r, c, r2, c2
    cdef double m
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
    return out_arr
