# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled instance router (same contract as ``_route_numpy.route_ids``)."""

import numpy as np
from libc.stdint cimport int8_t, int64_t, uint8_t


cdef int64_t _route(const int64_t[:, ::1] X, const int64_t[::1] y, const int64_t[::1] ids,
                    Py_ssize_t start, const int8_t[::1] kind, const int64_t[::1] attr,
                    const int64_t[::1] value, const int64_t[::1] left,
                    const int64_t[::1] right, const int64_t[::1] label,
                    int64_t[::1] leaf_out, uint8_t[::1] hit_out) noexcept nogil:
    cdef Py_ssize_t j, node
    cdef int64_t row, v, checks = 0
    cdef int8_t k
    for j in range(ids.shape[0]):
        row = ids[j]
        node = start
        checks += 1
        k = kind[node]
        while k != 0:
            v = X[row, attr[node]]
            if k == 1:
                node = right[node] if v == value[node] else left[node]
            else:
                node = left[node] if v <= value[node] else right[node]
            checks += 1
            k = kind[node]
        leaf_out[j] = node
        hit_out[j] = y[row] == label[node]
    return checks


def route_ids(X, y, ids, Py_ssize_t start, kind, attr, value, left, right, label):
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    cdef Py_ssize_t m = ids.shape[0]
    leaf = np.empty(m, dtype=np.int64)
    hit = np.empty(m, dtype=np.uint8)
    cdef int64_t checks
    checks = _route(X, y, ids, start, kind, attr, value, left, right, label, leaf, hit)
    return leaf, hit.view(np.bool_), int(checks)
