"""Canonical labeling by equitable refinement plus backtracking.

``canonical_form`` maps a graph (up to 16 vertices) to a byte string that is
identical for isomorphic graphs and distinct otherwise.  The search
individualizes vertices of the first non-singleton cell of the stable
ordered partition and prunes branches using automorphisms discovered when
two leaves produce the same relabeled adjacency.
"""

from __future__ import annotations

from .errors import CapacityError
from .graphs import Graph, bits

CANON_MAX = 16


def canonical_form(g: Graph) -> bytes:
    """Canonical byte string: equal iff isomorphic, stable across runs."""
    if g.n > CANON_MAX:
        raise CapacityError(f"canonical_form supports up to {CANON_MAX} vertices, got {g.n}")
    if g.n == 0:
        return b"\x00"
    labeling = canonical_labeling(g)
    return _leaf_bytes(g, labeling)


def canonical_labeling(g: Graph) -> list[int]:
    """A permutation (new index per old vertex) realizing the canonical form."""
    if g.n > CANON_MAX:
        raise CapacityError(f"canonical labeling supports up to {CANON_MAX} vertices, got {g.n}")
    searcher = _Searcher(g)
    searcher.run()
    return searcher.best_perm


def _leaf_bytes(g: Graph, perm: list[int]) -> bytes:
    rows = [0] * g.n
    for v in range(g.n):
        for u in bits(g.adj[v]):
            rows[perm[v]] |= 1 << perm[u]
    out = bytearray([g.n])
    for row in rows:
        out += row.to_bytes(2, "big")
    return bytes(out)


class _Searcher:
    def __init__(self, g: Graph):
        self.g = g
        self.best: bytes | None = None
        self.best_perm: list[int] = list(range(g.n))
        self.first: bytes | None = None
        self.first_perm: list[int] | None = None
        self.automorphisms: list[list[int]] = []

    def run(self) -> None:
        cells = self._refine([list(range(self.g.n))])
        self._search(cells, [])

    # An ordered partition is a list of vertex lists.  Refinement splits each
    # cell by the multiset of neighbor counts into the other cells until
    # stable; split order is deterministic, so the result is isomorphism
    # invariant.
    def _refine(self, cells: list[list[int]]) -> list[list[int]]:
        adj = self.g.adj
        while True:
            masks = [sum(1 << v for v in cell) for cell in cells]
            new_cells: list[list[int]] = []
            changed = False
            for cell in cells:
                if len(cell) == 1:
                    new_cells.append(cell)
                    continue
                keyed: dict[tuple[int, ...], list[int]] = {}
                for v in cell:
                    key = tuple((adj[v] & m).bit_count() for m in masks)
                    keyed.setdefault(key, []).append(v)
                if len(keyed) == 1:
                    new_cells.append(cell)
                else:
                    changed = True
                    for key in sorted(keyed):
                        new_cells.append(keyed[key])
            cells = new_cells
            if not changed:
                return cells

    def _search(self, cells: list[list[int]], prefix: list[int]) -> None:
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            self._record_leaf([c[0] for c in cells])
            return
        cell = cells[target]
        explored: list[int] = []
        for v in cell:
            if any(self._same_orbit(v, w, prefix) for w in explored):
                continue
            explored.append(v)
            split = cells[:target] + [[v], [u for u in cell if u != v]] + cells[target + 1:]
            self._search(self._refine(split), prefix + [v])

    def _record_leaf(self, order: list[int]) -> None:
        perm = [0] * self.g.n
        for pos, v in enumerate(order):
            perm[v] = pos
        leaf = _leaf_bytes(self.g, perm)
        if self.first is None:
            self.first, self.first_perm = leaf, perm
        elif leaf == self.first:
            self._add_automorphism(perm, self.first_perm)
        if self.best is None or leaf < self.best:
            self.best, self.best_perm = leaf, perm
        elif leaf == self.best and perm != self.best_perm:
            self._add_automorphism(perm, self.best_perm)

    def _add_automorphism(self, perm_a: list[int], perm_b: list[int]) -> None:
        # perm_a and perm_b map g onto the same labeled graph, so
        # inverse(perm_b) o perm_a is an automorphism of g.
        inv_b = [0] * self.g.n
        for v, pos in enumerate(perm_b):
            inv_b[pos] = v
        gamma = [inv_b[perm_a[v]] for v in range(self.g.n)]
        if gamma != list(range(self.g.n)) and gamma not in self.automorphisms:
            self.automorphisms.append(gamma)

    def _same_orbit(self, v: int, w: int, prefix: list[int]) -> bool:
        # v and w are interchangeable below this node if some known
        # automorphism fixes the individualized prefix and maps w to v.
        for gamma in self.automorphisms:
            if all(gamma[p] == p for p in prefix) and (gamma[w] == v or gamma[v] == w):
                return True
        return False
