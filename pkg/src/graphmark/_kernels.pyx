# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Fused binarization kernels.

``binarize_symmetric`` walks the upper triangle in square tiles, reading
the mirrored entry from the lower triangle, so the N x N boolean
intermediates of the numpy path are never allocated.
"""

import numpy as np


def binarize_symmetric(const double complex[:, ::1] a, double threshold):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t tile = 64, nt = (n + tile - 1) // tile
    cdef Py_ssize_t ti, tj, bi, bj, i, j, jstart, iend, jend
    cdef double t2 = threshold * threshold
    cdef double complex x, y
    cdef unsigned char v
    out = np.zeros((n, n), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    with nogil:
        for ti in range(nt):
            bi = ti * tile
            iend = min(bi + tile, n)
            for tj in range(ti, nt):
                bj = tj * tile
                jend = min(bj + tile, n)
                for i in range(bi, iend):
                    jstart = bj if bj > i else i + 1
                    for j in range(jstart, jend):
                        x = a[i, j]
                        y = a[j, i]
                        v = (x.real * x.real + x.imag * x.imag > t2) or (y.real * y.real + y.imag * y.imag > t2)
                        o[i, j] = v
                        o[j, i] = v
    return out


def upper_pairs(const unsigned char[:, ::1] b):
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i, j, k = 0, count = 0
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                count += b[i, j] != 0
    out = np.empty((count, 2), dtype=np.int64)
    cdef long long[:, ::1] o = out
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                if b[i, j]:
                    o[k, 0] = i
                    o[k, 1] = j
                    k += 1
    return out
