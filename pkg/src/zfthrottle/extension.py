"""PSD extension graphs and minor-script characterization certificates.

A completed PSD schedule turns a graph into a major of itself: every
initial blue vertex gets a labeled copy of the component breakdown tree,
root edges mirror blue-blue edges, and each non-forcing edge reappears as a
cross edge between copies at the depth where both endpoints are blue.
Contracting the tree edges whose endpoints share a label recovers the
original graph.

That construction drives the structural certificates: a graph throttles at
most t under the PSD rule exactly when it is obtainable from some
K_a square T_{k,b} with a + b = t by contracting tree edges and deleting
complete edges; the floor variant additionally deletes arbitrary edges.
``MinorScript`` records such a derivation explicitly and ``apply_script``
replays it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .canonical import canonical_form
from .engine import (
    ComponentTree,
    ForcingSchedule,
    Rule,
    Stalled,
    component_tree,
    propagate_deterministic,
)
from .errors import (
    CapacityError,
    DomainError,
    InternalConsistencyError,
    ScriptError,
    UsageError,
)
from .graphs import Graph, bits, popcount, spanning_supergraphs
from .products import (
    ProductTemplate,
    TreePath,
    cartesian_product_template,
    path_from_string,
    path_to_string,
    tree_size,
)
from .throttle import throttling_number

CHARACTERIZATION_MAX = 12
FLOOR_FLAVOR_MAX = 6
TEMPLATE_VERTEX_LIMIT = 32


@dataclass(frozen=True)
class LabeledExtensionTree:
    """A copy of the component tree with vertex names of G attached."""

    root_vertex: int
    tree: ComponentTree
    labels: tuple[int, ...]  # per tree node, a vertex of G


@dataclass(frozen=True)
class ExtensionGraph:
    """The PSD extension: labeled tree copies, root edges, cross edges."""

    graph: Graph
    base: Graph
    roots: tuple[int, ...]                       # sorted initial blue vertices
    tree: ComponentTree
    vertex_label: tuple[int, ...]                # extension vertex -> G vertex
    vertex_owner: tuple[int, ...]                # extension vertex -> root b
    tree_edges: tuple[tuple[int, int], ...]
    root_edges: tuple[tuple[int, int], ...]
    cross_edges: tuple[tuple[int, int], ...]

    def node_id(self, root_vertex: int, tree_node: int) -> int:
        idx = self.roots.index(root_vertex)
        return idx * len(self.tree.parent) + tree_node

    def recover(self) -> Graph:
        """Contract same-label tree edges; returns a graph equal to the base.

        Vertices of the result are ordered by their G-label, so this is an
        equality check, not merely isomorphism.
        """
        uf = _UnionFind(self.graph.n)
        for a, b in self.tree_edges:
            if self.vertex_label[a] == self.vertex_label[b]:
                uf.union(a, b)
        classes: dict[int, int] = {}
        for v in range(self.graph.n):
            root = uf.find(v)
            lab = self.vertex_label[v]
            if root in classes and classes[root] != lab:
                raise InternalConsistencyError("same contraction class carries two labels")
            classes[root] = lab
        if sorted(classes.values()) != list(range(self.base.n)):
            raise InternalConsistencyError("labels do not biject with the base graph")
        adj = [0] * self.base.n
        for a, b in self.graph.edges():
            la, lb = classes[uf.find(a)], classes[uf.find(b)]
            if la != lb:
                adj[la] |= 1 << lb
                adj[lb] |= 1 << la
        return Graph(self.base.n, adj, self.base.labels)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _force_roots(schedule: ForcingSchedule) -> dict[int, int]:
    """Map each vertex to the initial blue vertex heading its forcing chain."""
    parent = {f.target: f.source for f in schedule.forces}
    roots: dict[int, int] = {b: b for b in bits(schedule.blue0)}
    for v in list(parent):
        chain = []
        w = v
        while w not in roots:
            chain.append(w)
            w = parent[w]
        for x in chain:
            roots[x] = roots[w]
    return roots


def build_labeled_tree(b: int, ctree: ComponentTree, schedule: ForcingSchedule) -> LabeledExtensionTree:
    """Label a copy of the component tree for initial blue vertex ``b``.

    The root is labeled b; a vertex of b's forcing tree forced at time t in
    component W labels the node reached by W's lineage; every other node
    inherits its parent's label.
    """
    if schedule.rule is not Rule.Z_PLUS:
        raise UsageError("labeled extension trees require a PSD schedule")
    if not schedule.blue0 >> b & 1:
        raise UsageError(f"vertex {b} is not in the initial blue set")
    roots = _force_roots(schedule)
    labels: list[int | None] = [None] * len(ctree.parent)
    labels[0] = b
    for f in schedule.forces:
        if roots[f.target] == b:
            node = ctree.node_at(f.lineage)
            if labels[node] is not None:
                raise InternalConsistencyError(
                    f"tree node {node} labeled twice ({labels[node]} and {f.target})"
                )
            labels[node] = f.target
    for node in range(1, len(labels)):
        if labels[node] is None:
            labels[node] = labels[ctree.parent[node]]
    return LabeledExtensionTree(b, ctree, tuple(labels))


def build_extension(g: Graph, blue0: int, schedule: ForcingSchedule) -> ExtensionGraph:
    """Construct the PSD extension of g with respect to blue0 and a schedule."""
    if schedule.rule is not Rule.Z_PLUS:
        raise UsageError("extensions are defined for PSD schedules")
    if schedule.blue0 != blue0:
        raise UsageError("schedule was computed for a different blue set")
    if schedule.final_blue != g.full_mask:
        raise UsageError("schedule does not complete on this graph")
    check = propagate_deterministic(Rule.Z_PLUS, g, blue0)
    if isinstance(check, Stalled) or check.pt != schedule.pt:
        raise UsageError("schedule propagation time is not minimal for this blue set")

    ctree = component_tree(g, blue0, schedule)
    roots = tuple(sorted(bits(blue0)))
    labeled = {b: build_labeled_tree(b, ctree, schedule) for b in roots}

    m = len(ctree.parent)
    n_ext = len(roots) * m
    offset = {b: i * m for i, b in enumerate(roots)}
    vertex_label = [0] * n_ext
    vertex_owner = [0] * n_ext
    for b in roots:
        for node in range(m):
            vertex_label[offset[b] + node] = labeled[b].labels[node]
            vertex_owner[offset[b] + node] = b

    tree_edges = []
    for b in roots:
        for node in range(1, m):
            tree_edges.append((offset[b] + ctree.parent[node], offset[b] + node))

    owner_of = _force_roots(schedule)
    force_of = {f.target: f for f in schedule.forces}
    forcing_edge_set = {frozenset((f.source, f.target)) for f in schedule.forces}

    root_edges = []
    cross_edges = []
    for u, v in g.edges():
        if blue0 >> u & 1 and blue0 >> v & 1:
            root_edges.append((offset[u], offset[v]))
            continue
        if frozenset((u, v)) in forcing_edge_set:
            continue
        fu, fv = force_of.get(u), force_of.get(v)
        tu = fu.time if fu else 0
        tv = fv.time if fv else 0
        if tu == tv and fu and fv and fu.lineage != fv.lineage:
            raise InternalConsistencyError("adjacent vertices forced together in different components")
        lineage = (fu if tu >= tv else fv).lineage
        node = ctree.node_at(lineage)
        eu = offset[owner_of[u]] + node
        ev = offset[owner_of[v]] + node
        if vertex_label[eu] != u or vertex_label[ev] != v:
            raise InternalConsistencyError(
                f"cross edge for ({u}, {v}) lands on labels "
                f"({vertex_label[eu]}, {vertex_label[ev]})"
            )
        cross_edges.append((eu, ev))

    all_edges = tree_edges + root_edges + cross_edges
    ext_labels = [g.label(vertex_label[x]) for x in range(n_ext)]
    ext_graph = Graph.from_edges(n_ext, all_edges, ext_labels)
    return ExtensionGraph(
        graph=ext_graph,
        base=g,
        roots=roots,
        tree=ctree,
        vertex_label=tuple(vertex_label),
        vertex_owner=tuple(vertex_owner),
        tree_edges=tuple(tree_edges),
        root_edges=tuple(root_edges),
        cross_edges=tuple(cross_edges),
    )


# -- minor scripts ----------------------------------------------------------

ScriptNode = tuple[int, TreePath]


@dataclass(frozen=True)
class MinorScript:
    """A derivation of a graph from K_a square T_{k,b}.

    Contractions happen first (each must be a tree edge of the template;
    order is irrelevant), then deletions.  The psd flavor may delete
    complete edges only; the psd_floor flavor may delete any edge.
    """

    a: int
    k: int
    b: int
    flavor: str  # "psd" | "psd_floor"
    contractions: tuple[tuple[ScriptNode, ScriptNode], ...]
    deletions: tuple[tuple[ScriptNode, ScriptNode], ...]

    def to_dict(self) -> dict:
        def node(x: ScriptNode) -> list:
            return [x[0], path_to_string(x[1])]

        return {
            "a": self.a,
            "k": self.k,
            "b": self.b,
            "flavor": self.flavor,
            "contract": [[node(p), node(q)] for p, q in self.contractions],
            "delete": [[node(p), node(q)] for p, q in self.deletions],
        }

    @staticmethod
    def from_dict(data: dict) -> "MinorScript":
        def node(x) -> ScriptNode:
            return int(x[0]), path_from_string(x[1])

        return MinorScript(
            a=int(data["a"]),
            k=int(data["k"]),
            b=int(data["b"]),
            flavor=data["flavor"],
            contractions=tuple((node(p), node(q)) for p, q in data["contract"]),
            deletions=tuple((node(p), node(q)) for p, q in data["delete"]),
        )


def apply_script(script: MinorScript) -> Graph:
    """Replay a minor script on its template; deterministic.

    Raises ScriptError when a contraction is not a tree edge, a deletion
    names a contracted or absent edge, or a psd-flavor deletion touches a
    tree edge.
    """
    if script.flavor not in ("psd", "psd_floor"):
        raise UsageError(f"unknown script flavor {script.flavor!r}")
    template = cartesian_product_template(script.a, script.k, script.b)
    path_index = {path: i for i, path in enumerate(template.node_paths)}

    def vid(node: ScriptNode) -> int:
        i, path = node
        if not 0 <= i < script.a:
            raise ScriptError(f"clique index {i} outside 0..{script.a - 1}")
        if tuple(path) not in path_index:
            raise ScriptError(f"no tree node at path {path_to_string(tuple(path))!r}")
        return template.vertex(i, path_index[tuple(path)])

    tree_set = set(template.tree_edges)
    complete_set = set(template.complete_edges)

    uf = _UnionFind(template.graph.n)
    for p, q in script.contractions:
        a, b = vid(p), vid(q)
        e = (min(a, b), max(a, b))
        if e not in tree_set:
            raise ScriptError(f"contraction {p}-{q} is not a tree edge")
        uf.union(a, b)

    deleted: set[frozenset[int]] = set()
    for p, q in script.deletions:
        a, b = vid(p), vid(q)
        e = (min(a, b), max(a, b))
        if e not in tree_set and e not in complete_set:
            raise ScriptError(f"deletion {p}-{q} is not a template edge")
        if script.flavor == "psd" and e not in complete_set:
            raise ScriptError("psd scripts may delete complete edges only")
        if uf.find(a) == uf.find(b):
            raise ScriptError(f"deletion {p}-{q} names a previously contracted edge")
        deleted.add(frozenset(e))

    class_reps = sorted({uf.find(v) for v in range(template.graph.n)})
    index = {rep: i for i, rep in enumerate(class_reps)}
    adj = [0] * len(class_reps)
    for a, b in template.graph.edges():
        if frozenset((a, b)) in deleted:
            continue
        ca, cb = index[uf.find(a)], index[uf.find(b)]
        if ca != cb:
            adj[ca] |= 1 << cb
            adj[cb] |= 1 << ca
    return Graph(len(class_reps), adj)


# -- characterization certificates ------------------------------------------


@lru_cache(maxsize=1 << 16)
def _psd_profiles(n: int, adj: tuple[int, ...]) -> tuple[tuple[int, int, int], ...]:
    """(blue mask, pt, max branching) for every completing PSD propagation."""
    g = Graph(n, adj)
    out = []
    for blue0 in range(1, 1 << n):
        prop = propagate_deterministic(Rule.Z_PLUS, g, blue0)
        if isinstance(prop, Stalled):
            continue
        branching = component_tree(g, blue0, prop).max_branching() if prop.pt else 0
        out.append((blue0, prop.pt, max(1, branching)))
    return tuple(out)


def _template_choice(host: Graph, t: int) -> tuple[int, int, int, int] | None:
    """A realizing (size, blue0, k, b) with |B| + b = t, pt <= b, size <= 32.

    Prefers the throttling-optimal initial set padded up to height t - |B|
    (the constructive proof route); when that template does not fit in 32
    vertices, falls back to the smallest feasible template over all
    completing initial sets.
    """
    profiles = {blue0: (pt, k) for blue0, pt, k in _psd_profiles(host.n, host.adj)}
    th, cert = throttling_number(Rule.Z_PLUS, host)
    if th <= t and cert.blue0 in profiles:
        pt, k = profiles[cert.blue0]
        b_height = t - popcount(cert.blue0)
        size = popcount(cert.blue0) * tree_size(k, b_height)
        if size <= TEMPLATE_VERTEX_LIMIT:
            return size, cert.blue0, k, b_height
    best: tuple[int, int, int, int] | None = None
    for blue0, (pt, k) in profiles.items():
        size_b = popcount(blue0)
        b_height = t - size_b
        if b_height < pt or b_height < 0:
            continue
        size = size_b * tree_size(k, b_height)
        if size > TEMPLATE_VERTEX_LIMIT:
            continue
        cand = (size, blue0, k, b_height)
        if best is None or cand < best:
            best = cand
    return best


def characterization_certificate(g: Graph, t: int, flavor: str) -> MinorScript | None:
    """Produce a tree-product derivation of g when its throttling allows it.

    Returns a MinorScript from some K_a square T_{k,b} with a + b = t, or
    None when the corresponding throttling number exceeds t.  The emitted
    script is re-verified internally by ``apply_script`` plus isomorphism.
    """
    if flavor not in ("psd", "psd_floor"):
        raise UsageError(f"unknown flavor {flavor!r}")
    if g.n > CHARACTERIZATION_MAX:
        raise CapacityError(f"characterization supports up to {CHARACTERIZATION_MAX} vertices")
    if g.n == 0:
        raise DomainError("empty graph")
    if t < 1:
        raise DomainError("t must be a positive integer")

    if flavor == "psd":
        th, _ = throttling_number(Rule.Z_PLUS, g)
        if th > t:
            return None
        choice = _template_choice(g, t)
        if choice is None:
            raise CapacityError("no realizing template fits in 32 vertices")
        _, blue0, k, b_height = choice
        script = _script_from_schedule(g, g, blue0, k, b_height, flavor)
    else:
        if g.n > FLOOR_FLAVOR_MAX:
            raise CapacityError(
                f"the psd_floor flavor searches spanning supergraphs and supports "
                f"up to {FLOOR_FLAVOR_MAX} vertices"
            )
        th, _ = throttling_number(Rule.Z_PLUS_FLOOR, g)
        if th > t:
            return None
        best = None
        for h in spanning_supergraphs(g):
            choice = _template_choice(h, t)
            if choice is None:
                continue
            size, blue0, k, b_height = choice
            key = (size, h.edge_count(), tuple(h.adj), blue0)
            if best is None or key < best[0]:
                best = (key, h, blue0, k, b_height)
        if best is None:
            raise CapacityError("no realizing supergraph template fits in 32 vertices")
        _, host, blue0, k, b_height = best
        script = _script_from_schedule(host, g, blue0, k, b_height, flavor)

    produced = apply_script(script)
    if canonical_form(produced) != canonical_form(g):
        raise InternalConsistencyError("emitted script does not reproduce the graph")
    return script


def _script_from_schedule(
    host: Graph, target: Graph, blue0: int, k: int, b_height: int, flavor: str
) -> MinorScript:
    """Derive ``target`` from K_|B| square T_{k,b} through ``host``'s schedule.

    ``host`` equals ``target`` for the psd flavor; for psd_floor it is a
    spanning supergraph whose surplus edges are deleted at the end.
    """
    schedule = propagate_deterministic(Rule.Z_PLUS, host, blue0)
    assert isinstance(schedule, ForcingSchedule)
    ext = build_extension(host, blue0, schedule)
    ctree = ext.tree
    roots = ext.roots
    a = len(roots)
    template = cartesian_product_template(a, k, b_height)
    path_of_template_node = template.node_paths
    path_index = {p: i for i, p in enumerate(path_of_template_node)}

    # Embed the component tree into T_{k,b}: children in node order take
    # successive child branches.
    image_path: dict[int, TreePath] = {0: ()}
    order = sorted(range(len(ctree.parent)), key=lambda nd: (ctree.depth[nd], nd))
    child_counter: dict[int, int] = {}
    for node in order:
        if node == 0:
            continue
        parent = ctree.parent[node]
        slot = child_counter.get(parent, 0)
        child_counter[parent] = slot + 1
        image_path[node] = image_path[parent] + (slot,)
    image_of = {path_index[p]: nd for nd, p in image_path.items()}

    # Per copy: label every template tree node (images take the component
    # tree label, padding inherits from the parent).
    m = len(path_of_template_node)
    ctree_size = len(ctree.parent)
    labels_per_copy: list[list[int]] = []
    for copy, _b_vertex in enumerate(roots):
        tree_labels = [ext.vertex_label[copy * ctree_size + nd] for nd in range(ctree_size)]
        lab = [0] * m
        for tnode in range(m):  # BFS order: parents first
            if tnode in image_of:
                lab[tnode] = tree_labels[image_of[tnode]]
            else:
                lab[tnode] = lab[template.node_parent[tnode]]
        labels_per_copy.append(lab)

    def script_node(copy: int, tnode: int) -> ScriptNode:
        return copy, path_of_template_node[tnode]

    contractions = []
    deletions = []
    for copy in range(a):
        lab = labels_per_copy[copy]
        for tnode in range(1, m):
            parent = template.node_parent[tnode]
            if lab[tnode] == lab[parent]:
                contractions.append((script_node(copy, parent), script_node(copy, tnode)))
            elif not target.has_edge(lab[parent], lab[tnode]):
                deletions.append((script_node(copy, parent), script_node(copy, tnode)))
    for tnode in range(m):
        for i in range(a):
            for j in range(i + 1, a):
                x, y = labels_per_copy[i][tnode], labels_per_copy[j][tnode]
                if not target.has_edge(x, y):
                    deletions.append((script_node(i, tnode), script_node(j, tnode)))

    return MinorScript(
        a=a,
        k=k,
        b=b_height,
        flavor=flavor,
        contractions=tuple(contractions),
        deletions=tuple(deletions),
    )
