"""The four color change rules and their propagation engines.

Rules:

* ``Z``        -- a blue vertex forces its unique white neighbor.
* ``Z_PLUS``   -- positive semidefinite variant: the neighbor condition is
                  checked inside each component of the white subgraph.
* ``Z_FLOOR``  -- minor monotone floor of Z: a blue vertex whose neighbors
                  are all blue (except possibly the target) may force any
                  white vertex, spending its one-time activity.
* ``Z_PLUS_FLOOR`` -- floor of Z_PLUS with per-component activity.

For Z and Z_PLUS the layer sets produced by synchronized propagation are
unique to the initial blue set, so ``propagate_deterministic`` performs
every valid force each step.  For the floor rules the minimum propagation
time over force sets is found by breadth-first search over (blue set,
activity) states, trying every maximal admissible set of simultaneous
forces per step.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import CapacityError, InternalConsistencyError, UsageError
from .graphs import Graph, bits, connected_components, mask_of, popcount

FLOOR_SEARCH_MAX = 16


class Rule(Enum):
    Z = "z"
    Z_FLOOR = "zfloor"
    Z_PLUS = "zplus"
    Z_PLUS_FLOOR = "zplusfloor"

    @property
    def is_floor(self) -> bool:
        return self in (Rule.Z_FLOOR, Rule.Z_PLUS_FLOOR)

    @property
    def is_psd(self) -> bool:
        return self in (Rule.Z_PLUS, Rule.Z_PLUS_FLOOR)

    @staticmethod
    def from_string(text: str) -> "Rule":
        for rule in Rule:
            if rule.value == text:
                return rule
        raise UsageError(f"unknown rule {text!r}; expected one of "
                         + ", ".join(r.value for r in Rule))


@dataclass(frozen=True)
class Force:
    """A single force u -> w.

    ``time`` is the 1-based step index inside a schedule (0 for forces that
    merely describe what is valid at a state).  ``lineage`` is the sequence
    of white-component masks containing the target from the first step to
    the forcing step; it is empty under Z and Z_FLOOR.
    """

    source: int
    target: int
    time: int
    kind: str  # "standard" | "hop"
    lineage: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "u": self.source,
            "w": self.target,
            "t": self.time,
            "kind": self.kind,
            "lineage": [sorted(bits(c)) for c in self.lineage],
        }


@dataclass(frozen=True)
class ForcingSchedule:
    """A completed propagation: layers, per-step sources and the force list."""

    rule: Rule
    n: int
    blue0: int
    layers: tuple[int, ...]            # B^(t) masks, t = 1..pt
    sources: tuple[int, ...]           # U^(t) masks
    forces: tuple[Force, ...]
    step_components: tuple[tuple[int, ...], ...] = ()  # PSD rules only

    @property
    def pt(self) -> int:
        return len(self.layers)

    def cumulative(self, t: int) -> int:
        blue = self.blue0
        for layer in self.layers[:t]:
            blue |= layer
        return blue

    @property
    def final_blue(self) -> int:
        return self.cumulative(self.pt)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule.value,
            "n": self.n,
            "B": sorted(bits(self.blue0)),
            "layers": [sorted(bits(layer)) for layer in self.layers],
            "sources": [sorted(bits(src)) for src in self.sources],
            "forces": [f.to_dict() for f in self.forces],
        }


@dataclass(frozen=True)
class Stalled:
    """Propagation that can never finish: pt is infinite by definition."""

    rule: Rule
    blue0: int
    blue_final: int

    def to_dict(self) -> dict:
        return {
            "rule": self.rule.value,
            "B": sorted(bits(self.blue0)),
            "stalled": True,
            "finalBlue": sorted(bits(self.blue_final)),
        }


@dataclass(frozen=True)
class ForcingTree:
    """Rooted tree of forces descending from one initial blue vertex."""

    root: int
    vertices: int                       # mask
    edges: tuple[tuple[int, int], ...]  # (parent, child), sorted

    def children(self, v: int) -> list[int]:
        return [c for p, c in self.edges if p == v]


@dataclass(frozen=True)
class ComponentTree:
    """Breakdown of white components through a PSD propagation.

    Node 0 is the root; node i > 0 carries the component mask ``comp[i]``
    labelling its incoming edge.  The node at depth t is a component of the
    white set entering step t; height equals the propagation time.
    """

    parent: tuple[int, ...]
    comp: tuple[int | None, ...]
    depth: tuple[int, ...]

    @property
    def height(self) -> int:
        return max(self.depth) if self.depth else 0

    def children(self, node: int) -> list[int]:
        return [i for i, p in enumerate(self.parent) if p == node]

    def max_branching(self) -> int:
        counts = [0] * len(self.parent)
        for p in self.parent[1:]:
            counts[p] += 1
        return max(counts, default=0)

    def node_at(self, lineage: Iterable[int]) -> int:
        """Follow component-mask edge labels from the root."""
        node = 0
        for mask in lineage:
            for child in self.children(node):
                if self.comp[child] == mask:
                    node = child
                    break
            else:
                raise InternalConsistencyError(f"no child component {bin(mask)} below node {node}")
        return node

    def lineage_of(self, node: int) -> tuple[int, ...]:
        path: list[int] = []
        while node != 0:
            path.append(self.comp[node])
            node = self.parent[node]
        return tuple(reversed(path))


# -- rule predicates -------------------------------------------------------


def valid_forces(
    rule: Rule,
    g: Graph,
    blue: int,
    active: int | None = None,
    component_actives: Mapping[int, int] | None = None,
) -> list[Force]:
    """Every force the rule permits at this state, deterministic order.

    ``active`` is the still-active mask for Z_FLOOR (defaults to all blue);
    ``component_actives`` maps white-component masks to their active sets
    for Z_PLUS_FLOOR (defaults to all blue in every component).  Emitted
    forces carry time 0 and, for PSD rules, the target's component as
    lineage.
    """
    white = g.full_mask & ~blue
    out: list[Force] = []
    if rule is Rule.Z:
        for u in bits(blue):
            wn = g.adj[u] & white
            if popcount(wn) == 1:
                out.append(Force(u, wn.bit_length() - 1, 0, "standard"))
    elif rule is Rule.Z_PLUS:
        for comp in connected_components(g, white):
            for u in bits(blue):
                wn = g.adj[u] & comp
                if popcount(wn) == 1:
                    out.append(Force(u, wn.bit_length() - 1, 0, "standard", (comp,)))
    elif rule is Rule.Z_FLOOR:
        act = blue if active is None else active & blue
        for u in bits(act):
            wn = g.adj[u] & white
            if wn == 0:
                for w in bits(white):
                    out.append(Force(u, w, 0, "hop"))
            elif popcount(wn) == 1:
                out.append(Force(u, wn.bit_length() - 1, 0, "standard"))
    elif rule is Rule.Z_PLUS_FLOOR:
        comps = connected_components(g, white)
        for comp in comps:
            if component_actives is None:
                act = blue
            else:
                act = component_actives.get(comp, 0) & blue
            for u in bits(act):
                wn = g.adj[u] & comp
                if wn == 0:
                    for w in bits(comp):
                        out.append(Force(u, w, 0, "hop", (comp,)))
                elif popcount(wn) == 1:
                    out.append(Force(u, wn.bit_length() - 1, 0, "standard", (comp,)))
    else:  # pragma: no cover
        raise UsageError(f"unknown rule {rule}")
    return out


# -- deterministic propagation (Z, Z_PLUS) ---------------------------------


def propagate_deterministic(rule: Rule, g: Graph, blue0: int) -> ForcingSchedule | Stalled:
    """Synchronized propagation performing every valid force each step.

    Only Z and Z_PLUS admit this: their layer sets are independent of the
    chosen force set.  Each target is recorded with its least-index valid
    source.  A stall before the graph is all blue yields ``Stalled``.
    """
    if rule not in (Rule.Z, Rule.Z_PLUS):
        raise UsageError("deterministic propagation applies to rules z and zplus only")
    if blue0 & ~g.full_mask:
        raise UsageError("blue set outside vertex range")
    full = g.full_mask
    blue = blue0
    layers: list[int] = []
    sources: list[int] = []
    forces: list[Force] = []
    comps_per_step: list[tuple[int, ...]] = []
    paths: dict[int, tuple[int, ...]] = {}
    t = 0
    while blue != full:
        t += 1
        white = full & ~blue
        if rule is Rule.Z_PLUS:
            comps = connected_components(g, white)
            new_paths = {}
            for comp in comps:
                parent_path = ()
                for old, path in paths.items():
                    if comp & old == comp:
                        parent_path = path
                        break
                new_paths[comp] = parent_path + (comp,)
            paths = new_paths
            comps_per_step.append(tuple(comps))
        else:
            comps = [white]
        step: dict[int, tuple[int, tuple[int, ...]]] = {}
        for comp in comps:
            for u in bits(blue):
                wn = g.adj[u] & comp
                if popcount(wn) == 1:
                    w = wn.bit_length() - 1
                    if w not in step:
                        lineage = paths[comp] if rule is Rule.Z_PLUS else ()
                        step[w] = (u, lineage)
        if not step:
            return Stalled(rule, blue0, blue)
        layer = mask_of(step)
        layers.append(layer)
        sources.append(mask_of(u for u, _ in step.values()))
        for w in sorted(step):
            u, lineage = step[w]
            forces.append(Force(u, w, t, "standard", lineage))
        blue |= layer
    comps_field = tuple(comps_per_step) if rule is Rule.Z_PLUS else ()
    return ForcingSchedule(rule, g.n, blue0, tuple(layers), tuple(sources),
                           tuple(forces), comps_field)


def propagation_time(rule: Rule, g: Graph, blue0: int) -> int | None:
    """pt under the rule, or None when infinite."""
    if rule.is_floor:
        result = min_propagation_floor(rule, g, blue0)
        return None if isinstance(result, Stalled) else result[0]
    result = propagate_deterministic(rule, g, blue0)
    return None if isinstance(result, Stalled) else result.pt


# -- minimum propagation for the floor rules --------------------------------


def min_propagation_floor(
    rule: Rule,
    g: Graph,
    blue0: int,
    deactivation: str = "lineage",
) -> tuple[int, ForcingSchedule] | Stalled:
    """Minimum propagation time over all sets of floor-rule forces.

    Breadth-first search over states; per step every maximal admissible set
    of simultaneously valid forces is tried.  ``deactivation`` selects how
    Z_PLUS_FLOOR spends activity: ``"lineage"`` (the default) deactivates a
    forcing vertex only in the component where it forced and that
    component's descendants; ``"global"`` retires it everywhere.
    """
    if rule not in (Rule.Z_FLOOR, Rule.Z_PLUS_FLOOR):
        raise UsageError("min_propagation_floor applies to floor rules only")
    if g.n > FLOOR_SEARCH_MAX:
        raise CapacityError(f"floor-rule search supports up to {FLOOR_SEARCH_MAX} vertices")
    if deactivation not in ("lineage", "global"):
        raise UsageError("deactivation must be 'lineage' or 'global'")
    if blue0 & ~g.full_mask:
        raise UsageError("blue set outside vertex range")
    full = g.full_mask
    if blue0 == full:
        return 0, ForcingSchedule(rule, g.n, blue0, (), (), ())

    if rule is Rule.Z_FLOOR:
        initial = (blue0, 0)
    else:
        comps = connected_components(g, full & ~blue0)
        initial = (blue0, 0, frozenset((c, blue0) for c in comps))

    seen = {initial}
    frontier = [initial]
    parents: dict[object, tuple[object, tuple]] = {initial: (None, ())}
    depth = 0
    goal = None
    while frontier and goal is None:
        depth += 1
        nxt = []
        for state in frontier:
            for moves, new_state in _floor_transitions(rule, g, state, deactivation):
                if new_state in seen:
                    continue
                seen.add(new_state)
                parents[new_state] = (state, moves)
                if new_state[0] == full:
                    goal = new_state
                    break
                nxt.append(new_state)
            if goal is not None:
                break
        frontier = nxt
    if goal is None:
        best_blue = max(s[0] for s in seen)
        return Stalled(rule, blue0, best_blue)

    # Reconstruct the realizing schedule, replaying component lineages.
    chain: list[tuple] = []
    cursor = goal
    while parents[cursor][0] is not None:
        prev, moves = parents[cursor]
        chain.append(moves)
        cursor = prev
    chain.reverse()
    return len(chain), _schedule_from_steps(rule, g, blue0, chain)


def _floor_candidates(g: Graph, comp: int, act: int) -> list[tuple[int, int]]:
    """(source, target-mask) pairs valid inside one component context."""
    cands = []
    for u in bits(act):
        wn = g.adj[u] & comp
        if wn == 0:
            cands.append((u, comp))
        elif popcount(wn) == 1:
            cands.append((u, wn))
    return cands


def _maximal_matchings(cands: list[tuple[int, int]]) -> list[tuple[tuple[int, int], ...]]:
    """All maximal sets of (source, target) pairs with distinct sources/targets."""
    results: set[tuple[tuple[int, int], ...]] = set()

    def rec(i: int, used_targets: int, acc: list[tuple[int, int]], skipped: list[int]) -> None:
        if i == len(cands):
            for j in skipped:
                if cands[j][1] & ~used_targets:
                    return
            results.add(tuple(sorted(acc)))
            return
        src, tmask = cands[i]
        avail = tmask & ~used_targets
        for w in bits(avail):
            acc.append((src, w))
            rec(i + 1, used_targets | (1 << w), acc, skipped)
            acc.pop()
        skipped.append(i)
        rec(i + 1, used_targets, acc, skipped)
        skipped.pop()

    rec(0, 0, [], [])
    return sorted(results)


def _floor_transitions(rule: Rule, g: Graph, state: tuple, deactivation: str):
    """Yield (per-step force tuples, successor state)."""
    if rule is Rule.Z_FLOOR:
        blue, spent = state
        white = g.full_mask & ~blue
        cands = _floor_candidates(g, white, blue & ~spent)
        for matching in _maximal_matchings(cands):
            if not matching:
                continue
            targets = mask_of(w for _, w in matching)
            srcs = mask_of(u for u, _ in matching)
            moves = tuple((u, w, None) for u, w in matching)
            yield moves, (blue | targets, spent | srcs)
        return

    blue, spent, comp_states = state
    comp_map = dict(comp_states)
    per_comp_options: list[list[tuple[tuple[int, int], ...]]] = []
    comp_order = sorted(comp_map)
    for comp in comp_order:
        act = comp_map[comp] & blue & ~spent
        cands = _floor_candidates(g, comp, act)
        options = _maximal_matchings(cands)
        per_comp_options.append(options if options else [()])

    def product(idx: int, chosen: list[tuple[tuple[int, int], ...]]):
        if idx == len(comp_order):
            yield tuple(chosen)
            return
        for option in per_comp_options[idx]:
            chosen.append(option)
            yield from product(idx + 1, chosen)
            chosen.pop()

    for combo in product(0, []):
        all_forces = [(u, w, comp_order[ci]) for ci, opt in enumerate(combo) for u, w in opt]
        if not all_forces:
            continue
        targets = mask_of(w for _, w, _ in all_forces)
        new_blue = blue | targets
        new_white = g.full_mask & ~new_blue
        new_comps = connected_components(g, new_white) if new_white else []
        sources_by_comp: dict[int, int] = {}
        targets_by_comp: dict[int, int] = {}
        for u, w, comp in all_forces:
            sources_by_comp[comp] = sources_by_comp.get(comp, 0) | (1 << u)
            targets_by_comp[comp] = targets_by_comp.get(comp, 0) | (1 << w)
        new_states = []
        for nc in new_comps:
            old = next(c for c in comp_order if nc & c == nc)
            membership = comp_map[old] | targets_by_comp.get(old, 0)
            if deactivation == "lineage":
                membership &= ~sources_by_comp.get(old, 0)
            new_states.append((nc, membership))
        if deactivation == "global":
            new_spent = spent | mask_of(u for u, _, _ in all_forces)
        else:
            new_spent = 0
        moves = tuple(sorted(all_forces))
        yield moves, (new_blue, new_spent, frozenset(new_states))


def _schedule_from_steps(rule: Rule, g: Graph, blue0: int, chain: list[tuple]) -> ForcingSchedule:
    blue = blue0
    layers: list[int] = []
    sources: list[int] = []
    forces: list[Force] = []
    comps_per_step: list[tuple[int, ...]] = []
    paths: dict[int, tuple[int, ...]] = {}
    for t, moves in enumerate(chain, start=1):
        white = g.full_mask & ~blue
        if rule is Rule.Z_PLUS_FLOOR:
            comps = connected_components(g, white)
            new_paths = {}
            for comp in comps:
                parent_path = ()
                for old, path in paths.items():
                    if comp & old == comp:
                        parent_path = path
                        break
                new_paths[comp] = parent_path + (comp,)
            paths = new_paths
            comps_per_step.append(tuple(comps))
        layer = 0
        srcs = 0
        for u, w, comp in moves:
            layer |= 1 << w
            srcs |= 1 << u
            if rule is Rule.Z_PLUS_FLOOR:
                lineage = paths[comp]
                kind = "standard" if g.adj[u] & comp & (1 << w) and popcount(g.adj[u] & comp) == 1 else "hop"
            else:
                lineage = ()
                wn = g.adj[u] & white
                kind = "standard" if wn == 1 << w else "hop"
            forces.append(Force(u, w, t, kind, lineage))
        layers.append(layer)
        sources.append(srcs)
        blue |= layer
    comps_field = tuple(comps_per_step) if rule is Rule.Z_PLUS_FLOOR else ()
    return ForcingSchedule(rule, g.n, blue0, tuple(layers), tuple(sources),
                           tuple(forces), comps_field)


# -- forcing trees and component trees --------------------------------------


def forcing_trees(g: Graph, schedule: ForcingSchedule) -> list[ForcingTree]:
    """One tree per initial blue vertex; vertex sets partition V(G)."""
    if not isinstance(schedule, ForcingSchedule):
        raise UsageError("forcing_trees needs a completed schedule")
    if schedule.final_blue != g.full_mask:
        raise UsageError("schedule does not color the whole graph")
    parent: dict[int, int] = {}
    for f in schedule.forces:
        parent[f.target] = f.source
    root_of: dict[int, int] = {}

    def find_root(v: int) -> int:
        seen = []
        while v in parent:
            seen.append(v)
            v = parent[v]
        for w in seen:
            root_of[w] = v
        return v

    trees = []
    for b in bits(schedule.blue0):
        members = [b] + [v for v in parent if find_root(v) == b]
        edges = sorted((parent[v], v) for v in members if v in parent)
        trees.append(ForcingTree(b, mask_of(members), tuple(edges)))
    covered = 0
    for tree in trees:
        if covered & tree.vertices:
            raise InternalConsistencyError("forcing trees overlap")
        covered |= tree.vertices
    if covered != g.full_mask:
        raise InternalConsistencyError("forcing trees do not partition the graph")
    return trees


def component_tree(g: Graph, blue0: int, schedule: ForcingSchedule) -> ComponentTree:
    """The rooted breakdown tree of white components under a Z_PLUS schedule."""
    if schedule.rule is not Rule.Z_PLUS:
        raise UsageError("component trees are defined for PSD schedules")
    if schedule.blue0 != blue0:
        raise UsageError("schedule was computed for a different blue set")
    parent: list[int] = [-1]
    comp: list[int | None] = [None]
    depth: list[int] = [0]
    blue = blue0
    previous: dict[int, int] = {}  # comp mask -> node id at previous depth
    for t in range(1, schedule.pt + 1):
        white = g.full_mask & ~blue
        current: dict[int, int] = {}
        for c in connected_components(g, white):
            if t == 1:
                p = 0
            else:
                p = next(node for old, node in previous.items() if c & old == c)
            parent.append(p)
            comp.append(c)
            depth.append(t)
            current[c] = len(parent) - 1
        previous = current
        blue |= schedule.layers[t - 1]
    return ComponentTree(tuple(parent), tuple(comp), tuple(depth))
