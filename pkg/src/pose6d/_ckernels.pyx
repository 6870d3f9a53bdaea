# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: assignment solve and closest-point distances.

Semantics match pose6d._pykernels exactly (same arithmetic order).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt


def solve_assignment(cost):
    """Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres)."""
    cdef const double[:, ::1] a = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_arr = np.zeros(n + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v_arr = np.zeros(n + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] minv_arr = np.zeros(n + 1)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] p_arr = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] way_arr = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used_arr = np.zeros(n + 1, dtype=np.uint8)
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] minv = minv_arr
    cdef long long[::1] p = p_arr
    cdef long long[::1] way = way_arr
    cdef unsigned char[::1] used = used_arr
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur, ui0

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INFINITY
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            ui0 = u[i0]
            delta = INFINITY
            j1 = -1
            for j in range(1, n + 1):
                if not used[j]:
                    cur = a[i0 - 1, j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    perm = np.empty(n, dtype=np.int64)
    cdef long long[::1] perm_v = perm
    for j in range(1, n + 1):
        perm_v[p[j] - 1] = j - 1
    return perm


def mean_closest_distance(a, b):
    """Mean over rows of a of the distance to the closest row of b."""
    cdef const double[:, ::1] pa = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] pb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = pa.shape[0]
    cdef Py_ssize_t nb = pb.shape[0]
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    cdef double best, dx, dy, dz, d2
    for i in range(na):
        best = INFINITY
        for j in range(nb):
            dx = pb[j, 0] - pa[i, 0]
            dy = pb[j, 1] - pa[i, 1]
            dz = pb[j, 2] - pa[i, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 < best:
                best = d2
        total += sqrt(best)
    return total / na
