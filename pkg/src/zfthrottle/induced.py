"""Induced-subgraph search by backtracking over neighbor bitsets.

The embedding must preserve both edges and non-edges among mapped vertices.
Pattern vertices are assigned in index order and host candidates are tried
ascending, so the first embedding found is the lexicographically smallest;
the result is deterministic for fixed inputs.
"""

from __future__ import annotations

from .graphs import Graph


def induced_subgraph_search(pattern: Graph, host: Graph) -> tuple[int, ...] | None:
    """Injective map phi (tuple indexed by pattern vertex) or None."""
    p, h = pattern, host
    if p.n > h.n:
        return None
    if p.n == 0:
        return ()
    pdeg = [p.degree(v) for v in range(p.n)]
    hdeg = [h.degree(v) for v in range(h.n)]
    # earlier_nbrs[i]: pattern neighbors of i among 0..i-1
    earlier = [p.adj[i] & ((1 << i) - 1) for i in range(p.n)]
    assign = [0] * p.n

    def extend(i: int, used: int) -> bool:
        if i == p.n:
            return True
        req = 0
        for j in range(i):
            if earlier[i] >> j & 1:
                req |= 1 << assign[j]
        for v in range(h.n):
            bit = 1 << v
            if used & bit or hdeg[v] < pdeg[i]:
                continue
            if (h.adj[v] & used) == req:
                assign[i] = v
                if extend(i + 1, used | bit):
                    return True
        return False

    if extend(0, 0):
        return tuple(assign)
    return None


def contains_induced(pattern: Graph, host: Graph) -> bool:
    return induced_subgraph_search(pattern, host) is not None
