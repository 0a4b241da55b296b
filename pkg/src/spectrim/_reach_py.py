"""Pure-Python reachability kernel over a CSR adjacency."""

from collections import deque


def reach(indptr, indices, entries):
    n = len(indptr) - 1
    seen = bytearray(n)
    queue = deque()
    for e in entries:
        if not seen[e]:
            seen[e] = 1
            queue.append(e)
    while queue:
        v = queue.popleft()
        for i in range(indptr[v], indptr[v + 1]):
            w = indices[i]
            if not seen[w]:
                seen[w] = 1
                queue.append(w)
    return seen
