# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled half-space mask scan.

For every integer point ``z`` with ``lo <= z <= hi`` the mask has bit ``i``
set iff ``G[i] . z >= h[i]``.  The last coordinate is never iterated point
by point: along it each inequality flips at most once, so a line of the box
splits into at most ``k + 1`` constant-mask segments.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t _floordiv(int64_t a, int64_t b) nogil:
    cdef int64_t q = a // b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


def mask_scan(G, h, lo, hi):
    cdef int64_t[:, ::1] g = np.ascontiguousarray(G, dtype=np.int64)
    cdef int64_t[::1] hv = np.ascontiguousarray(h, dtype=np.int64)
    cdef int64_t[::1] lov = np.ascontiguousarray(lo, dtype=np.int64)
    cdef int64_t[::1] hiv = np.ascontiguousarray(hi, dtype=np.int64)
    cdef Py_ssize_t k = g.shape[0]
    cdef Py_ssize_t n = g.shape[1]
    cdef Py_ssize_t size = 1 << k

    counts_arr = np.zeros(size, dtype=np.int64)
    first_arr = np.zeros((size, n), dtype=np.int64)
    seen_arr = np.zeros(size, dtype=np.uint8)
    cdef int64_t[::1] counts = counts_arr
    cdef int64_t[:, ::1] first = first_arr
    cdef cnp.uint8_t[::1] seen = seen_arr

    cdef Py_ssize_t i, j, a, b
    for i in range(n):
        if hiv[i] < lov[i]:
            return counts_arr, first_arr, seen_arr

    z_arr = np.array(lov, dtype=np.int64)
    partial_arr = np.zeros(k, dtype=np.int64)
    pos_arr = np.zeros(k, dtype=np.int64)
    row_arr = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] z = z_arr
    cdef int64_t[::1] partial = partial_arr
    cdef int64_t[::1] pos = pos_arr
    cdef int64_t[::1] row = row_arr

    cdef int64_t lo_n = lov[n - 1]
    cdef int64_t hi_n = hiv[n - 1]
    cdef int64_t gl, rhs, p, cur, mask, tp, tr
    cdef Py_ssize_t nev
    cdef bint done = False

    with nogil:
        while not done:
            for i in range(k):
                partial[i] = 0
                for j in range(n - 1):
                    partial[i] += g[i, j] * z[j]
            mask = 0
            nev = 0
            for i in range(k):
                gl = g[i, n - 1]
                if partial[i] + gl * lo_n >= hv[i]:
                    mask |= (<int64_t>1) << i
                if gl == 0:
                    continue
                rhs = hv[i] - partial[i]
                if gl > 0:
                    p = -_floordiv(-rhs, gl)
                else:
                    p = _floordiv(rhs, gl) + 1
                if p > lo_n and p <= hi_n:
                    # insertion sort keeps events ordered by position
                    a = nev
                    while a > 0 and pos[a - 1] > p:
                        pos[a] = pos[a - 1]
                        row[a] = row[a - 1]
                        a -= 1
                    pos[a] = p
                    row[a] = i
                    nev += 1
            cur = lo_n
            for a in range(nev + 1):
                if a < nev:
                    tp = pos[a]
                else:
                    tp = hi_n + 1
                if tp > cur:
                    counts[mask] += tp - cur
                    if not seen[mask]:
                        seen[mask] = 1
                        for j in range(n - 1):
                            first[mask, j] = z[j]
                        first[mask, n - 1] = cur
                    cur = tp
                if a < nev:
                    mask ^= (<int64_t>1) << row[a]
            # odometer over the first n - 1 coordinates, last one fastest
            done = True
            b = n - 2
            while b >= 0:
                if z[b] < hiv[b]:
                    z[b] += 1
                    done = False
                    break
                z[b] = lov[b]
                b -= 1

    return counts_arr, first_arr, seen_arr
