# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled reachability kernel over a CSR adjacency."""

from libc.stdlib cimport malloc, free


def reach(const long long[:] indptr, const long long[:] indices, const long long[:] entries):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef bytearray out = bytearray(n)
    cdef unsigned char[:] seen = out
    cdef long long *queue
    cdef Py_ssize_t head = 0, tail = 0, i, k
    cdef long long v, w
    if n <= 0:
        return out
    for k in range(entries.shape[0]):
        if entries[k] < 0 or entries[k] >= n:
            raise IndexError(f"entry {entries[k]} out of range")
    for k in range(indices.shape[0]):
        if indices[k] < 0 or indices[k] >= n:
            raise IndexError(f"edge target {indices[k]} out of range")
    queue = <long long *> malloc(n * sizeof(long long))
    if queue == NULL:
        raise MemoryError()
    try:
        for k in range(entries.shape[0]):
            v = entries[k]
            if not seen[v]:
                seen[v] = 1
                queue[tail] = v
                tail += 1
        while head < tail:
            v = queue[head]
            head += 1
            for i in range(indptr[v], indptr[v + 1]):
                w = indices[i]
                if not seen[w]:
                    seen[w] = 1
                    queue[tail] = w
                    tail += 1
    finally:
        free(queue)
    return out
