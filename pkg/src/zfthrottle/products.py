"""Cartesian products of a complete graph with a uniform rooted tree.

``cartesian_product_template(a, k, b)`` builds K_a square T_{k,b}, where
T_{k,b} is the rooted tree of height b whose internal vertices all have k
children.  Every edge is classified: tree edges live inside a tree copy,
complete edges inside a clique copy.  Template vertices are addressed as
(clique index, tree path), the path being the child-index sequence from the
root.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError, DomainError
from .graphs import MAX_VERTICES, Graph

TreePath = tuple[int, ...]


def tree_size(k: int, b: int) -> int:
    if k == 1:
        return b + 1
    return (k ** (b + 1) - 1) // (k - 1)


@dataclass(frozen=True)
class ProductTemplate:
    """K_a square T_{k,b} with per-edge classification."""

    a: int
    k: int
    b: int
    graph: Graph
    tree_edges: tuple[tuple[int, int], ...]
    complete_edges: tuple[tuple[int, int], ...]
    node_paths: tuple[TreePath, ...]          # tree node index -> path from root
    node_parent: tuple[int, ...]              # tree node index -> parent index (-1 at root)

    @property
    def tree_node_count(self) -> int:
        return len(self.node_paths)

    def vertex(self, clique_index: int, node: int) -> int:
        """Flat vertex id of tree node ``node`` in clique copy ``clique_index``."""
        return clique_index * self.tree_node_count + node

    def node_at(self, path: TreePath) -> int:
        try:
            return self.node_paths.index(tuple(path))
        except ValueError:
            raise DomainError(f"no tree node at path {path}") from None

    def edge_class(self, u: int, v: int) -> str:
        e = (min(u, v), max(u, v))
        if e in self._tree_edge_set():
            return "tree"
        if e in self._complete_edge_set():
            return "complete"
        raise DomainError(f"({u}, {v}) is not a template edge")

    def _tree_edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.tree_edges)

    def _complete_edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.complete_edges)


def cartesian_product_template(a: int, k: int, b: int) -> ProductTemplate:
    """Build K_a square T_{k,b}; raises CapacityError above 32 vertices."""
    if a < 1 or k < 1 or b < 0:
        raise DomainError(f"need a >= 1, k >= 1, b >= 0; got a={a}, k={k}, b={b}")
    t = tree_size(k, b)
    total = a * t
    if total > MAX_VERTICES:
        raise CapacityError(f"K_{a} x T_{{{k},{b}}} has {total} vertices; limit is {MAX_VERTICES}")

    # Breadth-first tree layout: deterministic node ids per path.
    paths: list[TreePath] = [()]
    parent: list[int] = [-1]
    frontier: list[int] = [0]
    for _depth in range(b):
        nxt: list[int] = []
        for node in frontier:
            for child in range(k):
                paths.append(paths[node] + (child,))
                parent.append(node)
                nxt.append(len(paths) - 1)
        frontier = nxt
    assert len(paths) == t

    def vid(i: int, node: int) -> int:
        return i * t + node

    tree_edges = []
    complete_edges = []
    adjacency_pairs: list[tuple[int, int]] = []
    for i in range(a):
        for node in range(1, t):
            e = (vid(i, parent[node]), vid(i, node))
            tree_edges.append(e)
            adjacency_pairs.append(e)
    for node in range(t):
        for i in range(a):
            for j in range(i + 1, a):
                e = (vid(i, node), vid(j, node))
                complete_edges.append(e)
                adjacency_pairs.append(e)
    graph = Graph.from_edges(total, adjacency_pairs)
    return ProductTemplate(
        a=a,
        k=k,
        b=b,
        graph=graph,
        tree_edges=tuple(tree_edges),
        complete_edges=tuple(complete_edges),
        node_paths=tuple(paths),
        node_parent=tuple(parent),
    )


def path_to_string(path: TreePath) -> str:
    return ".".join(str(c) for c in path)


def path_from_string(text: str) -> TreePath:
    if text == "":
        return ()
    try:
        return tuple(int(part) for part in text.split("."))
    except ValueError:
        raise DomainError(f"bad tree path string {text!r}") from None
