"""Pure-Python reachability kernels over CSR adjacency.

Same contract as the compiled module: `indptr` is an int32 array of length
n+1, `indices` the concatenated neighbor lists. Kept dependency-light so it
behaves identically on any platform.
"""

import numpy as np


def closure(indptr, indices, start):
    """All vertices reachable from `start` (inclusive), sorted, as int32."""
    n = len(indptr) - 1
    ip = indptr.tolist() if hasattr(indptr, "tolist") else list(indptr)
    ix = indices.tolist() if hasattr(indices, "tolist") else list(indices)
    seen = bytearray(n)
    seen[start] = 1
    stack = [start]
    while stack:
        u = stack.pop()
        for i in range(ip[u], ip[u + 1]):
            v = ix[i]
            if not seen[v]:
                seen[v] = 1
                stack.append(v)
    return np.flatnonzero(np.frombuffer(bytes(seen), dtype=np.uint8)).astype(np.int32)


def reaches(indptr, indices, start, target):
    """True iff `target` is reachable from `start` (start == target counts)."""
    if start == target:
        return True
    n = len(indptr) - 1
    ip = indptr.tolist() if hasattr(indptr, "tolist") else list(indptr)
    ix = indices.tolist() if hasattr(indices, "tolist") else list(indices)
    seen = bytearray(n)
    seen[start] = 1
    stack = [start]
    while stack:
        u = stack.pop()
        for i in range(ip[u], ip[u + 1]):
            v = ix[i]
            if v == target:
                return True
            if not seen[v]:
                seen[v] = 1
                stack.append(v)
    return False
