# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled reachability kernels over CSR adjacency (int32)."""

import numpy as np

cimport numpy as cnp


def closure(cnp.int32_t[::1] indptr, cnp.int32_t[::1] indices, int start):
    """All vertices reachable from `start` (inclusive), sorted, as int32."""
    cdef int n = indptr.shape[0] - 1
    seen_arr = np.zeros(n, dtype=np.uint8)
    stack_arr = np.empty(n, dtype=np.int32)
    cdef cnp.uint8_t[::1] seen = seen_arr
    cdef cnp.int32_t[::1] stack = stack_arr
    cdef int top = 0
    cdef int u, v
    cdef cnp.int32_t i
    seen[start] = 1
    stack[top] = start
    top += 1
    while top > 0:
        top -= 1
        u = stack[top]
        for i in range(indptr[u], indptr[u + 1]):
            v = indices[i]
            if seen[v] == 0:
                seen[v] = 1
                stack[top] = v
                top += 1
    return np.flatnonzero(seen_arr).astype(np.int32)


def reaches(cnp.int32_t[::1] indptr, cnp.int32_t[::1] indices, int start, int target):
    """True iff `target` is reachable from `start` (start == target counts)."""
    if start == target:
        return True
    cdef int n = indptr.shape[0] - 1
    seen_arr = np.zeros(n, dtype=np.uint8)
    stack_arr = np.empty(n, dtype=np.int32)
    cdef cnp.uint8_t[::1] seen = seen_arr
    cdef cnp.int32_t[::1] stack = stack_arr
    cdef int top = 0
    cdef int u, v
    cdef cnp.int32_t i
    seen[start] = 1
    stack[top] = start
    top += 1
    while top > 0:
        top -= 1
        u = stack[top]
        for i in range(indptr[u], indptr[u + 1]):
            v = indices[i]
            if v == target:
                return True
            if seen[v] == 0:
                seen[v] = 1
                stack[top] = v
                top += 1
    return False
