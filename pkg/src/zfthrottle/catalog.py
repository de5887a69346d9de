"""Named forbidden graphs, classifiers, and accelerator families.

``classify_th_eq_n`` and ``classify_thplus`` decide the high-throttling
trichotomies purely by induced-subgraph search.  Accelerator graphs are the
building blocks of the finite forbidden families: an (a_1, ..., a_r)-
accelerator partitions into matched blocks S_i, T_i whose edge structure
lets S-side vertices force all of T_i in one synchronized step.  The family
G_k is the union of all accelerator classes over compositions of k + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .canonical import canonical_form
from .errors import CapacityError, DomainError
from .graphs import Graph, bits, is_connected, mask_of, popcount
from .induced import contains_induced, induced_subgraph_search

GK_MAX = 2

_NAMED_EDGES: dict[str, tuple[int, list[tuple[int, int]]]] = {
    "P4": (4, [(0, 1), (1, 2), (2, 3)]),
    "C4": (4, [(0, 1), (1, 2), (2, 3), (3, 0)]),
    "C5": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
    # two triangles sharing vertex 2
    "bowtie": (5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]),
    # C5 plus the chord {0, 2}: a triangle on top of a C4
    "house": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]),
    # two diamonds (K4 minus an edge) joined at degree-2 vertices
    "double_diamond": (8, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3),
                           (4, 5), (4, 6), (5, 6), (5, 7), (6, 7),
                           (3, 4)]),
    "K2bar": (2, []),
    "K3bar": (3, []),
    "twoK2": (4, [(0, 1), (2, 3)]),
    "K2xP3": (6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]),
    "K2xP4": (8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7),
                  (0, 4), (1, 5), (2, 6), (3, 7)]),
}

NAMED_GRAPH_NAMES = tuple(sorted(_NAMED_EDGES))


@lru_cache(maxsize=None)
def named_graph(name: str) -> Graph:
    """One of the catalog's fixed forbidden graphs, by name."""
    if name not in _NAMED_EDGES:
        raise DomainError(f"unknown graph name {name!r}; known: {', '.join(NAMED_GRAPH_NAMES)}")
    n, edges = _NAMED_EDGES[name]
    return Graph.from_edges(n, edges)


def classify_th_eq_n(g: Graph) -> bool:
    """True iff the standard throttling number equals the order of g.

    Equivalent to g containing no induced P4, C4, or bowtie; requires a
    connected input.
    """
    if not is_connected(g):
        raise DomainError("the th = n classification assumes a connected graph")
    return not any(
        contains_induced(named_graph(name), g) for name in ("P4", "C4", "bowtie")
    )


def classify_thplus(g: Graph) -> str:
    """PSD throttling trichotomy: 'equals_n', 'equals_n_minus_1' or 'below'.

    th_plus(G) = n exactly for complete graphs; th_plus(G) >= n - 1 exactly
    when no induced complement-of-K3, C5, house, or double diamond exists.
    """
    if not is_connected(g):
        raise DomainError("the PSD trichotomy assumes a connected graph")
    if not contains_induced(named_graph("K2bar"), g):
        return "equals_n"
    forbidden = ("K3bar", "C5", "house", "double_diamond")
    if not any(contains_induced(named_graph(name), g) for name in forbidden):
        return "equals_n_minus_1"
    return "below"


# -- accelerator recognition -------------------------------------------------


@dataclass(frozen=True)
class AcceleratorDecomposition:
    """Witness that a graph is an (a_1, ..., a_r)-accelerator."""

    composition: tuple[int, ...]
    s_sets: tuple[int, ...]      # masks, |S_i| = a_i + 1
    t_sets: tuple[int, ...]      # masks, |T_i| = a_i + 1
    matchings: tuple[tuple[tuple[int, int], ...], ...]

    def to_dict(self) -> dict:
        return {
            "composition": list(self.composition),
            "S": [sorted(bits(m)) for m in self.s_sets],
            "T": [sorted(bits(m)) for m in self.t_sets],
            "matchings": [[list(pair) for pair in m] for m in self.matchings],
        }


def _block_matching(g: Graph, s_mask: int, t_mask: int) -> tuple[tuple[int, int], ...] | None:
    """The S-T edges, provided they form a perfect matching; else None."""
    pairs = []
    seen_targets = 0
    for s in bits(s_mask):
        hit = g.adj[s] & t_mask
        if popcount(hit) != 1:
            return None
        t = hit.bit_length() - 1
        if seen_targets >> t & 1:
            return None
        seen_targets |= 1 << t
        pairs.append((s, t))
    return tuple(pairs)


def _edges_legal(g: Graph, comp: tuple[int, ...], s_sets: list[int], t_sets: list[int]) -> bool:
    """Every edge must fit one of the allowed accelerator edge types.

    Allowed: the block matchings, edges inside an S_i or a T_i, and edges
    from S_i back to earlier blocks.  Edges between S_i and T_i beyond the
    matching are forbidden outright.
    """
    r = len(comp)
    earlier = [0] * r
    acc = 0
    for i in range(r):
        earlier[i] = acc
        acc |= s_sets[i] | t_sets[i]
    for u, v in g.edges():
        ok = False
        for i in range(r):
            s, t = s_sets[i], t_sets[i]
            u_in_s, v_in_s = s >> u & 1, s >> v & 1
            u_in_t, v_in_t = t >> u & 1, t >> v & 1
            if (u_in_s and v_in_t) or (v_in_s and u_in_t):
                match = _block_matching(g, s, t)
                pair = (u, v) if u_in_s else (v, u)
                if match is None or pair not in match:
                    return False  # non-matching S_i-T_i edge: illegal, full stop
        for i in range(r):
            s, t = s_sets[i], t_sets[i]
            if (s >> u & 1 and s >> v & 1) or (t >> u & 1 and t >> v & 1):
                ok = True
                break
            if (s >> u & 1 and t >> v & 1) or (s >> v & 1 and t >> u & 1):
                ok = True  # necessarily the matching edge after the check above
                break
            if (s >> u & 1 and earlier[i] >> v & 1) or (s >> v & 1 and earlier[i] >> u & 1):
                ok = True  # backward edge from S_i to an earlier block
                break
        if not ok:
            return False
    return True


def _dominated(g: Graph, s_mask: int, t_prev: int) -> bool:
    """Every vertex of S_i lies in T_{i-1} or has a neighbor there."""
    for v in bits(s_mask):
        if t_prev >> v & 1:
            continue
        if not g.adj[v] & t_prev:
            return False
    return True


def is_accelerator(g: Graph, composition: tuple[int, ...]) -> AcceleratorDecomposition | None:
    """Search for an accelerator decomposition witnessing the composition.

    Backtracks over ordered block systems, pruning on perfect matchings,
    domination, and coverage arithmetic; returns the first witness in
    deterministic order, or None.
    """
    comp = tuple(composition)
    if len(comp) < 1 or any(a < 1 for a in comp):
        raise DomainError("compositions consist of positive integers")
    r = len(comp)
    sizes = [a + 1 for a in comp]
    max_cover = sum(2 * s for s in sizes)
    max_overlap = sum(min(sizes[i], sizes[i + 1]) for i in range(r - 1))
    if not max_cover - max_overlap <= g.n <= max_cover:
        return None
    full = g.full_mask

    def future_new_bounds(next_block: int) -> tuple[int, int]:
        # How many uncovered vertices blocks next_block..r-1 can absorb:
        # T_j always contributes sizes[j] fresh vertices, S_j between
        # sizes[j] - overlap_cap and sizes[j] (overlap with T_{j-1}).
        lo = hi = 0
        for j in range(next_block, r):
            cap = min(sizes[j - 1], sizes[j]) if j > 0 else 0
            lo += sizes[j] + max(0, sizes[j] - cap)
            hi += 2 * sizes[j]
        return lo, hi

    def choose_s(i: int, s_sets: list[int], t_sets: list[int], covered: int):
        banned = 0
        for x in s_sets:
            banned |= x
        for j, x in enumerate(t_sets):
            if j != i - 1:
                banned |= x
        pool = [v for v in range(g.n) if not banned >> v & 1]
        for s_combo in combinations(pool, sizes[i]):
            s_mask = mask_of(s_combo)
            if i >= 1 and not _dominated(g, s_mask, t_sets[i - 1]):
                continue
            yield from choose_t(i, s_sets + [s_mask], t_sets, covered | s_mask)

    def choose_t(i: int, s_sets: list[int], t_sets: list[int], covered: int):
        pool = [v for v in range(g.n) if not covered >> v & 1]
        for t_combo in combinations(pool, sizes[i]):
            t_mask = mask_of(t_combo)
            if _block_matching(g, s_sets[i], t_mask) is None:
                continue
            now = covered | t_mask
            uncovered = popcount(full & ~now)
            if i + 1 == r:
                if uncovered == 0 and _edges_legal(g, comp, s_sets, t_sets + [t_mask]):
                    yield s_sets, t_sets + [t_mask]
            else:
                lo, hi = future_new_bounds(i + 1)
                if lo <= uncovered <= hi:
                    yield from choose_s(i + 1, s_sets, t_sets + [t_mask], now)

    for s_sets, t_sets in choose_s(0, [], [], 0):
        return AcceleratorDecomposition(
            composition=comp,
            s_sets=tuple(s_sets),
            t_sets=tuple(t_sets),
            matchings=tuple(_block_matching(g, s, t) for s, t in zip(s_sets, t_sets)),
        )
    return None


def brute_force_accelerator(g: Graph, composition: tuple[int, ...]) -> AcceleratorDecomposition | None:
    """Independent, plain enumeration of accelerator decompositions.

    Iterates every ordered block system compatible with the set-level
    constraints and defers all edge properties (matchings, legality,
    domination) to a single check on the completed system.  Serves as the
    oracle for ``is_accelerator``.
    """
    comp = tuple(composition)
    if len(comp) < 1 or any(a < 1 for a in comp):
        raise DomainError("compositions consist of positive integers")
    r = len(comp)
    sizes = [a + 1 for a in comp]
    full = g.full_mask

    def check(s_sets: list[int], t_sets: list[int]) -> bool:
        union = 0
        for x in s_sets + t_sets:
            union |= x
        if union != full:
            return False
        for i in range(r):
            if _block_matching(g, s_sets[i], t_sets[i]) is None:
                return False
        for i in range(1, r):
            if not _dominated(g, s_sets[i], t_sets[i - 1]):
                return False
        return _edges_legal(g, comp, s_sets, t_sets)

    def rec(i: int, s_sets: list[int], t_sets: list[int]):
        if i == r:
            if check(s_sets, t_sets):
                yield list(s_sets), list(t_sets)
            return
        s_banned = 0
        for x in s_sets:
            s_banned |= x
        for j, x in enumerate(t_sets):
            if j != i - 1:
                s_banned |= x
        covered_now = 0
        for x in s_sets + t_sets:
            covered_now |= x
        # set-level feasibility: the remaining blocks must absorb exactly the
        # uncovered vertices (T_j is always fresh, S_j may reuse T_{j-1})
        lo = hi = 0
        for j in range(i, r):
            cap = min(sizes[j - 1], sizes[j]) if j > 0 else 0
            lo += sizes[j] + max(0, sizes[j] - cap)
            hi += 2 * sizes[j]
        uncovered_now = popcount(full & ~covered_now)
        if not lo <= uncovered_now <= hi:
            return
        s_pool = [v for v in range(g.n) if not s_banned >> v & 1]
        for s_combo in combinations(s_pool, sizes[i]):
            s_mask = mask_of(s_combo)
            t_banned = s_mask
            for x in t_sets:
                t_banned |= x
            for x in s_sets:
                t_banned |= x
            t_pool = [v for v in range(g.n) if not t_banned >> v & 1]
            for t_combo in combinations(t_pool, sizes[i]):
                yield from rec(i + 1, s_sets + [s_mask], t_sets + [mask_of(t_combo)])

    for s_sets, t_sets in rec(0, [], []):
        return AcceleratorDecomposition(
            composition=comp,
            s_sets=tuple(s_sets),
            t_sets=tuple(t_sets),
            matchings=tuple(_block_matching(g, s, t) for s, t in zip(s_sets, t_sets)),
        )
    return None


# -- family generation -------------------------------------------------------


@dataclass(frozen=True)
class GkMember:
    graph: Graph
    composition: tuple[int, ...]
    decomposition: AcceleratorDecomposition


def compositions_of(total: int) -> list[tuple[int, ...]]:
    """Ordered compositions of ``total`` into positive parts."""
    if total == 0:
        return [()]
    out = []
    for first in range(1, total + 1):
        for rest in compositions_of(total - first):
            out.append((first,) + rest)
    return out


def generate_family(composition: tuple[int, ...], max_vertices: int | None = None) -> list[GkMember]:
    """All isomorphism classes of (a_1, ..., a_r)-accelerators.

    Enumerates overlap patterns T_i ∩ S_{i+1} and all admissible optional
    edge subsets over a fixed vertex layout, then dedups canonically.
    ``max_vertices`` skips layouts producing larger members.
    """
    comp = tuple(composition)
    r = len(comp)
    sizes = [a + 1 for a in comp]
    members: dict[bytes, GkMember] = {}
    overlap_ranges = [range(0, min(sizes[i], sizes[i + 1]) + 1) for i in range(r - 1)]

    def overlap_vectors(i: int, acc: tuple[int, ...]):
        if i == r - 1:
            yield acc
            return
        for o in overlap_ranges[i]:
            yield from overlap_vectors(i + 1, acc + (o,))

    for overlaps in overlap_vectors(0, ()):
        n = sum(2 * s for s in sizes) - sum(overlaps)
        if max_vertices is not None and n > max_vertices:
            continue
        if n > 16:
            raise CapacityError(f"family member would have {n} > 16 vertices")
        # vertex layout: S_1, T_1, S_2 \ T_1, T_2, S_3 \ T_2, ...
        s_sets: list[int] = []
        t_sets: list[int] = []
        cursor = 0
        for i in range(r):
            if i == 0:
                s_mask = mask_of(range(cursor, cursor + sizes[0]))
                cursor += sizes[0]
            else:
                o = overlaps[i - 1]
                shared = sorted(bits(t_sets[i - 1]))[:o]
                fresh = range(cursor, cursor + sizes[i] - o)
                s_mask = mask_of(shared) | mask_of(fresh)
                cursor += sizes[i] - o
            t_mask = mask_of(range(cursor, cursor + sizes[i]))
            cursor += sizes[i]
            s_sets.append(s_mask)
            t_sets.append(t_mask)
        assert cursor == n

        mandatory = []
        for i in range(r):
            s_list, t_list = sorted(bits(s_sets[i])), sorted(bits(t_sets[i]))
            mandatory += [(s_list[j], t_list[j]) for j in range(sizes[i])]

        earlier = [0] * r
        acc = 0
        for i in range(r):
            earlier[i] = acc
            acc |= s_sets[i] | t_sets[i]

        optional: list[tuple[int, int]] = []
        seen_pairs: set[tuple[int, int]] = set(mandatory)
        forbidden: set[tuple[int, int]] = set()
        for i in range(r):
            for u in bits(s_sets[i]):
                for v in bits(t_sets[i]):
                    pair = (min(u, v), max(u, v))
                    if (u, v) not in mandatory and (v, u) not in mandatory:
                        forbidden.add(pair)

        def offer(u: int, v: int) -> None:
            pair = (min(u, v), max(u, v))
            if pair in seen_pairs or pair in forbidden or u == v:
                return
            seen_pairs.add(pair)
            optional.append(pair)

        for i in range(r):
            for u, v in combinations(sorted(bits(s_sets[i])), 2):
                offer(u, v)
            for u, v in combinations(sorted(bits(t_sets[i])), 2):
                offer(u, v)
            for u in bits(s_sets[i]):
                for v in bits(earlier[i]):
                    offer(u, v)

        base_edges = [(min(u, v), max(u, v)) for u, v in mandatory]
        for pick in range(1 << len(optional)):
            edges = list(base_edges)
            for idx in bits(pick):
                edges.append(optional[idx])
            g = Graph.from_edges(n, edges)
            if any(not _dominated(g, s_sets[i], t_sets[i - 1]) for i in range(1, r)):
                continue
            key = canonical_form(g)
            if key not in members:
                decomposition = AcceleratorDecomposition(
                    composition=comp,
                    s_sets=tuple(s_sets),
                    t_sets=tuple(t_sets),
                    matchings=tuple(_block_matching(g, s, t) for s, t in zip(s_sets, t_sets)),
                )
                members[key] = GkMember(g, comp, decomposition)
    return [members[key] for key in sorted(members)]


def generate_Gk(k: int, reduced: bool = False, max_vertices: int | None = None) -> list[GkMember]:
    """The forbidden family G_k: accelerators over all compositions of k + 1.

    ``reduced`` drops members that contain another member as an induced
    subgraph (useful for reporting and search); the unreduced family is the
    one the characterization theorem quantifies over.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k > GK_MAX:
        raise CapacityError(f"family generation supports k <= {GK_MAX}")
    seen: dict[bytes, GkMember] = {}
    for comp in compositions_of(k + 1):
        for member in generate_family(comp, max_vertices=max_vertices):
            key = canonical_form(member.graph)
            if key not in seen:
                seen[key] = member
    members = [seen[key] for key in sorted(seen)]
    if not reduced:
        return members
    kept = []
    for m in members:
        contains_other = any(
            other is not m
            and other.graph.n <= m.graph.n
            and canonical_form(other.graph) != canonical_form(m.graph)
            and contains_induced(other.graph, m.graph)
            for other in members
        )
        if not contains_other:
            kept.append(m)
    return kept


def contains_Gk_member(g: Graph, k: int) -> tuple[GkMember, tuple[int, ...]] | None:
    """First reduced-G_k member embedding induced into g, with the embedding."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k > GK_MAX:
        raise CapacityError(f"catalog search supports k <= {GK_MAX}")
    for member in generate_Gk(k, reduced=True, max_vertices=g.n):
        phi = induced_subgraph_search(member.graph, g)
        if phi is not None:
            return member, phi
    return None
