"""Immutable small-graph representation on adjacency bitsets.

Graphs are capped at 32 vertices; every algorithm in the package is an
exhaustive search, so a vertex set is always a plain int bitmask and a graph
is a tuple of neighbor masks.  Vertex labels are optional strings carried
through contractions.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import CapacityError, DomainError, UsageError

MAX_VERTICES = 32


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount(mask: int) -> int:
    return mask.bit_count()


class Graph:
    """A simple, finite, undirected graph with at most 32 vertices.

    Instances are immutable and hashable; all mutating operations return a
    new graph.  ``adj[v]`` is the neighbor bitmask of vertex ``v``; adjacency
    is symmetric and irreflexive.
    """

    __slots__ = ("n", "adj", "labels", "_hash")

    def __init__(self, n: int, adj: Iterable[int], labels: Iterable[str] | None = None):
        if not 0 <= n <= MAX_VERTICES:
            raise CapacityError(f"vertex count {n} outside supported range 0..{MAX_VERTICES}")
        adj = tuple(adj)
        if len(adj) != n:
            raise UsageError(f"adjacency has {len(adj)} rows for {n} vertices")
        full = (1 << n) - 1
        for v, row in enumerate(adj):
            if row & ~full:
                raise UsageError(f"vertex {v} has neighbors outside 0..{n - 1}")
            if row >> v & 1:
                raise UsageError(f"vertex {v} has a loop")
        for v, row in enumerate(adj):
            for u in bits(row):
                if not adj[u] >> v & 1:
                    raise UsageError(f"adjacency not symmetric at ({v}, {u})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adj", adj)
        lab = tuple(labels) if labels is not None else None
        if lab is not None and len(lab) != n:
            raise UsageError("labels length does not match vertex count")
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "_hash", hash((n, adj, lab)))

    def __setattr__(self, *_):
        raise AttributeError("Graph is immutable")

    # -- basic queries ----------------------------------------------------

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def vertices(self) -> range:
        return range(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u]) if u < v]

    def edge_count(self) -> int:
        return sum(popcount(row) for row in self.adj) // 2

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.adj == other.adj
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]], labels: Iterable[str] | None = None) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise UsageError(f"loop edge ({u}, {v})")
            if not (0 <= u < n and 0 <= v < n):
                raise UsageError(f"edge ({u}, {v}) outside 0..{n - 1}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return Graph(n, adj, labels)

    @staticmethod
    def empty(n: int) -> "Graph":
        return Graph(n, [0] * n)

    @staticmethod
    def complete(n: int) -> "Graph":
        full = (1 << n) - 1
        return Graph(n, [full ^ (1 << v) for v in range(n)])

    @staticmethod
    def path(n: int) -> "Graph":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @staticmethod
    def cycle(n: int) -> "Graph":
        if n < 3:
            raise DomainError("cycles need at least 3 vertices")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @staticmethod
    def star(leaves: int) -> "Graph":
        return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# -- transformations (all pure) -------------------------------------------


def add_edge(g: Graph, u: int, v: int) -> Graph:
    if u == v or not (0 <= u < g.n and 0 <= v < g.n):
        raise UsageError(f"invalid edge ({u}, {v})")
    adj = list(g.adj)
    adj[u] |= 1 << v
    adj[v] |= 1 << u
    return Graph(g.n, adj, g.labels)


def delete_edge(g: Graph, u: int, v: int) -> Graph:
    if not g.has_edge(u, v):
        raise DomainError(f"({u}, {v}) is not an edge")
    adj = list(g.adj)
    adj[u] &= ~(1 << v)
    adj[v] &= ~(1 << u)
    return Graph(g.n, adj, g.labels)


def contract_edge(g: Graph, u: int, v: int) -> Graph:
    """Contract edge uv; the merged vertex sits at index min(u, v).

    The merged vertex keeps the label of ``u`` (the first argument), and its
    neighborhood is the union of both endpoints' neighborhoods minus the
    merged vertex itself.  Higher vertex indices shift down by one.
    """
    if u == v or not g.has_edge(u, v):
        raise DomainError(f"({u}, {v}) is not an edge; cannot contract")
    keep, drop = min(u, v), max(u, v)
    merged = (g.adj[u] | g.adj[v]) & ~(1 << u) & ~(1 << v)

    def remap(mask: int) -> int:
        out = 0
        for w in bits(mask):
            out |= 1 << (w if w < drop else w - 1)
        return out

    old_ids = [w for w in range(g.n) if w != drop]
    new_index = {w: i for i, w in enumerate(old_ids)}
    rows = [0] * (g.n - 1)
    for w in old_ids:
        if w == keep:
            src = merged
        else:
            src = g.adj[w] & ~(1 << drop)
            if g.adj[w] >> drop & 1:
                src |= 1 << keep
        rows[new_index[w]] = remap(src)
    labels = None
    if g.labels is not None:
        labels = [g.labels[w] for w in old_ids]
        labels[new_index[keep]] = g.labels[u]
    return Graph(g.n - 1, rows, labels)


def induced_subgraph(g: Graph, vertex_mask: int) -> Graph:
    """Induced subgraph on ``vertex_mask``; vertices renumber in ascending order."""
    if vertex_mask & ~g.full_mask:
        raise UsageError("vertex mask outside graph")
    keep = list(bits(vertex_mask))
    index = {v: i for i, v in enumerate(keep)}
    adj = [0] * len(keep)
    for v in keep:
        for u in bits(g.adj[v] & vertex_mask):
            adj[index[v]] |= 1 << index[u]
    labels = [g.labels[v] for v in keep] if g.labels is not None else None
    return Graph(len(keep), adj, labels)


def complement(g: Graph) -> Graph:
    full = g.full_mask
    return Graph(g.n, [full & ~g.adj[v] & ~(1 << v) for v in range(g.n)], g.labels)


def disjoint_union(a: Graph, b: Graph) -> Graph:
    if a.n + b.n > MAX_VERTICES:
        raise CapacityError("disjoint union exceeds 32 vertices")
    adj = list(a.adj) + [row << a.n for row in b.adj]
    labels = None
    if a.labels is not None or b.labels is not None:
        labels = [a.label(v) for v in range(a.n)] + [b.label(v) for v in range(b.n)]
    return Graph(a.n + b.n, adj, labels)


def connected_components(g: Graph, within: int | None = None) -> list[int]:
    """Component masks of the subgraph induced on ``within`` (default: all).

    Components are ordered by their lowest vertex.
    """
    remaining = g.full_mask if within is None else within
    comps = []
    while remaining:
        seed = remaining & -remaining
        comp = seed
        frontier = seed
        while frontier:
            grow = 0
            for v in bits(frontier):
                grow |= g.adj[v]
            frontier = grow & remaining & ~comp
            comp |= frontier
        comps.append(comp)
        remaining &= ~comp
    return comps


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    return len(connected_components(g)) == 1


def spanning_supergraphs(g: Graph) -> Iterator[Graph]:
    """All graphs on the same vertex set whose edge set contains E(g)."""
    non_edges = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if not g.has_edge(u, v)]
    for pick in range(1 << len(non_edges)):
        adj = list(g.adj)
        for i in bits(pick):
            u, v = non_edges[i]
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        yield Graph(g.n, adj, g.labels)


def parse_edge_list(text: str) -> Graph:
    """Parse the plain text edge-list format: ``n m`` header then ``u v`` lines."""
    tokens = text.split()
    if len(tokens) < 2:
        raise UsageError("edge list needs an 'n m' header")
    try:
        n, m = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise UsageError(f"bad edge list header: {exc}") from None
    if len(tokens) != 2 + 2 * m:
        raise UsageError(f"expected {m} edges, found {(len(tokens) - 2) // 2}")
    pairs = []
    for i in range(m):
        try:
            u, v = int(tokens[2 + 2 * i]), int(tokens[3 + 2 * i])
        except ValueError as exc:
            raise UsageError(f"bad edge entry: {exc}") from None
        pairs.append((u, v))
    return Graph.from_edges(n, pairs)


def emit_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count()}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def relabel(g: Graph, perm: list[int]) -> Graph:
    """Apply the permutation ``perm`` (new index of each old vertex)."""
    adj = [0] * g.n
    for v in range(g.n):
        for u in bits(g.adj[v]):
            adj[perm[v]] |= 1 << perm[u]
    labels = None
    if g.labels is not None:
        labels = [""] * g.n
        for v in range(g.n):
            labels[perm[v]] = g.labels[v]
    return Graph(g.n, adj, labels)
