# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics match ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()


def best_mixture(a, h, double energy, p_grid, double slack=1e-12):
    cdef cnp.float64_t[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.float64_t[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef cnp.float64_t[::1] pv = np.ascontiguousarray(p_grid, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], g = pv.shape[0]
    cdef Py_ssize_t i, j, k, bi = -1, bj = -1
    cdef double limit = energy + slack * (fabs(energy) if fabs(energy) > 1.0 else 1.0)
    cdef double best = -INFINITY, bp = 0.0
    cdef double p, en, val, di, dj
    with nogil:
        for i in range(n):
            di = hv[i] - energy
            for j in range(i, n):
                for k in range(g):
                    p = pv[k]
                    en = (1.0 - p) * hv[i] + p * hv[j]
                    if en <= limit:
                        val = (1.0 - p) * av[i] + p * av[j]
                        if val > best:
                            best, bi, bj, bp = val, i, j, p
                dj = hv[j] - energy
                if di * dj < 0.0:
                    p = di / (hv[i] - hv[j])
                    val = (1.0 - p) * av[i] + p * av[j]
                    if val > best:
                        best, bi, bj, bp = val, i, j, p
    return best, bi, bj, bp
