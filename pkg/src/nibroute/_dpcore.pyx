# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled max-plus layer update for the space-time planner."""

from cython.parallel cimport prange
from libc.math cimport INFINITY


def maxplus_layer(const double[::1] v_old, const long long[::1] indptr,
                  const long long[::1] preds, const double[::1] reward,
                  double[::1] v_new, int nthreads=1):
    """v_new[s] = max(v_old[p] for p in preds of s) + reward[s]."""
    cdef Py_ssize_t n = v_new.shape[0]
    cdef Py_ssize_t s, e
    cdef double best, v
    if nthreads < 1:
        nthreads = 1
    for s in prange(n, nogil=True, schedule="static", num_threads=nthreads):
        best = -INFINITY
        for e in range(indptr[s], indptr[s + 1]):
            v = v_old[preds[e]]
            if v > best:
                best = v
        v_new[s] = best + reward[s]
