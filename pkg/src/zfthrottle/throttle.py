"""Exact throttling numbers and witness machinery for all four rules.

The throttling number of a graph under rule R is the minimum over all
initial sets B of |B| + pt_R(G; B).  Everything here is exhaustive: subsets
are searched in increasing size with the bound |B| <= th, ties are broken
by the smallest bitmask, and every derived object (savings profiles,
standardized witnesses, extracted certificate subgraphs) is checked against
its defining identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .engine import (
    ForcingSchedule,
    Rule,
    Stalled,
    min_propagation_floor,
    propagate_deterministic,
)
from .errors import CapacityError, DomainError, UsageError
from .graphs import Graph, bits, induced_subgraph, mask_of, popcount, spanning_supergraphs

THROTTLE_MAX = 16
SUPERGRAPH_ORACLE_MAX = 6


@dataclass(frozen=True)
class ThrottlingCertificate:
    """An initial set realizing the throttling number, with its schedule."""

    rule: Rule
    blue0: int
    schedule: ForcingSchedule
    pt: int
    th: int
    savings_profile: tuple[int, ...]   # |B^(t)| - 1 per step

    @property
    def witness_kind(self) -> str:
        return "standard_witness" if all(s >= 1 for s in self.savings_profile) else "witness"

    def to_dict(self) -> dict:
        d = self.schedule.to_dict()
        d.update(
            th=self.th,
            pt=self.pt,
            savings={"total": sum(self.savings_profile), "profile": list(self.savings_profile)},
            witnessKind=self.witness_kind,
        )
        return d


def _solve(rule: Rule, g: Graph, blue0: int) -> ForcingSchedule | Stalled:
    if rule.is_floor:
        result = min_propagation_floor(rule, g, blue0)
        return result if isinstance(result, Stalled) else result[1]
    return propagate_deterministic(rule, g, blue0)


def certificate_for(rule: Rule, g: Graph, blue0: int) -> ThrottlingCertificate | Stalled:
    """Certificate for a specific initial set (not necessarily optimal)."""
    schedule = _solve(rule, g, blue0)
    if isinstance(schedule, Stalled):
        return schedule
    profile = tuple(popcount(layer) - 1 for layer in schedule.layers)
    pt = schedule.pt
    return ThrottlingCertificate(rule, blue0, schedule, pt, popcount(blue0) + pt, profile)


def throttling_number(rule: Rule, g: Graph) -> tuple[int, ThrottlingCertificate]:
    """Exact minimum of |B| + pt_R(G; B) with a realizing certificate."""
    if g.n == 0:
        raise DomainError("throttling is undefined on the empty graph")
    if g.n > THROTTLE_MAX:
        raise CapacityError(f"throttling search supports up to {THROTTLE_MAX} vertices")
    return _throttle_cached(rule, g.n, g.adj)


@lru_cache(maxsize=1 << 18)
def _throttle_cached(rule: Rule, n: int, adj: tuple[int, ...]) -> tuple[int, ThrottlingCertificate]:
    g = Graph(n, adj)
    best_th: int | None = None
    best_mask: int | None = None
    best_cert: ThrottlingCertificate | None = None
    for size in range(1, n + 1):
        if best_th is not None and size > best_th:
            break
        for blue0 in _masks_of_size(n, size):
            cert = certificate_for(rule, g, blue0)
            if isinstance(cert, Stalled):
                continue
            if best_th is None or cert.th < best_th or (cert.th == best_th and blue0 < best_mask):
                best_th, best_mask, best_cert = cert.th, blue0, cert
    assert best_cert is not None  # B = V(G) always completes with pt 0
    return best_th, best_cert


def _masks_of_size(n: int, size: int):
    # ascending bitmask order within one subset size (Gosper's hack)
    if size == 0:
        yield 0
        return
    mask = (1 << size) - 1
    limit = 1 << n
    while mask < limit:
        yield mask
        low = mask & -mask
        ripple = mask + low
        mask = ripple | ((mask ^ ripple) >> (low.bit_length() + 1))


def savings(cert: ThrottlingCertificate) -> tuple[int, tuple[int, ...]]:
    """Total savings and the per-step profile |B^(t)| - 1.

    The total always equals |V(G)| - |B| - pt because the layers partition
    the white vertices.
    """
    total = sum(cert.savings_profile)
    expected = cert.schedule.n - popcount(cert.blue0) - cert.pt
    if total != expected:
        raise UsageError("certificate layers do not partition the white vertices")
    return total, cert.savings_profile


def standardize_witness(g: Graph, rule: Rule, cert: ThrottlingCertificate) -> ThrottlingCertificate:
    """Absorb every singleton layer into B until all layers force >= 2 vertices.

    The throttling value never increases: each absorbed singleton trades one
    initial vertex for at least one saved time step.  Already-standard
    certificates come back unchanged.
    """
    current = cert
    while True:
        singletons = mask_of(
            layer.bit_length() - 1 for layer in current.schedule.layers if popcount(layer) == 1
        )
        if not singletons:
            return current
        new_blue = current.blue0 | singletons
        nxt = certificate_for(rule, g, new_blue)
        if isinstance(nxt, Stalled):
            raise UsageError("enlarging the blue set stalled propagation; invalid certificate")
        if nxt.th > current.th:
            raise UsageError("witness standardization increased the throttling value")
        current = nxt


@dataclass(frozen=True)
class CertificateSubgraph:
    """Induced subgraph extracted from a high-savings witness.

    ``graph`` is G[X] for X the union of the first r source sets and
    (trimmed) layers; it has at most 4k+4 vertices and throttles at most
    |X| - k - 1 under the same rule.
    """

    graph: Graph
    vertex_map: tuple[int, ...]   # subgraph index -> original vertex
    x_mask: int
    cut_step: int                 # r
    trimmed_layer: int            # \hat B^(r), original coordinates
    layer_masks: tuple[int, ...]  # \hat B^(i), original coordinates
    source_masks: tuple[int, ...]  # U^(i) restricted to kept targets
    seed_mask: int                # \hat B, the forcing set used inside H
    k: int

    @property
    def size_bound(self) -> int:
        return 4 * self.k + 4


def extract_certificate_subgraph(g: Graph, rule: Rule, k: int) -> CertificateSubgraph:
    """Cut a witness down to an induced subgraph certifying low throttling.

    Requires th_rule(G) < |V(G)| - k with k >= 0 and |V(G)| >= k.  The
    extraction follows the savings accounting: take a standard witness, stop
    at the first step r where cumulative savings reach k+1, trim the last
    layer to make the total exactly k+1, and keep only sources and (trimmed)
    layer vertices.
    """
    if rule not in (Rule.Z, Rule.Z_PLUS):
        raise UsageError("certificate extraction applies to rules z and zplus")
    if k < 0:
        raise DomainError("k must be nonnegative")
    if g.n < k:
        raise DomainError(f"need |V(G)| >= k; got {g.n} < {k}")
    th, cert = throttling_number(rule, g)
    if th >= g.n - k:
        raise DomainError(f"th = {th} does not certify th < n - k = {g.n - k}")
    cert = standardize_witness(g, rule, cert)
    schedule = cert.schedule
    profile = cert.savings_profile
    acc = 0
    r = None
    for i, s in enumerate(profile, start=1):
        acc += s
        if acc >= k + 1:
            r = i
            break
    if r is None:
        raise DomainError("witness savings never reach k + 1; certificate invalid")
    before = sum(profile[: r - 1])
    keep_count = (k + 1 - before) + 1
    layer_r = schedule.layers[r - 1]
    trimmed = mask_of(sorted(bits(layer_r))[:keep_count])

    layer_masks = list(schedule.layers[: r - 1]) + [trimmed]
    source_masks = []
    for t in range(1, r + 1):
        kept_targets = layer_masks[t - 1]
        srcs = mask_of(
            f.source for f in schedule.forces if f.time == t and kept_targets >> f.target & 1
        )
        source_masks.append(srcs)

    x_mask = 0
    for t in range(r):
        x_mask |= source_masks[t] | layer_masks[t]
    seed = 0
    seen_layers = 0
    for t in range(r):
        seed |= source_masks[t] & ~seen_layers
        seen_layers |= layer_masks[t]

    vertex_map = tuple(sorted(bits(x_mask)))
    sub = induced_subgraph(g, x_mask)
    result = CertificateSubgraph(
        graph=sub,
        vertex_map=vertex_map,
        x_mask=x_mask,
        cut_step=r,
        trimmed_layer=trimmed,
        layer_masks=tuple(layer_masks),
        source_masks=tuple(source_masks),
        seed_mask=seed,
        k=k,
    )
    if sub.n > result.size_bound:
        raise DomainError(f"extracted subgraph has {sub.n} > 4k+4 = {result.size_bound} vertices")
    return result


def floor_throttling_via_supergraphs(rule: Rule, g: Graph) -> int:
    """Floor-rule throttling as a minimum over spanning supergraphs.

    th_floor(G) equals the minimum of the corresponding non-floor throttling
    number over all graphs H obtained by adding edges to G.  This is an
    independent oracle for ``throttling_number`` under the floor rules.
    """
    if rule not in (Rule.Z_FLOOR, Rule.Z_PLUS_FLOOR):
        raise UsageError("the supergraph oracle applies to floor rules only")
    if g.n > SUPERGRAPH_ORACLE_MAX:
        raise CapacityError(
            f"supergraph enumeration supports up to {SUPERGRAPH_ORACLE_MAX} vertices"
        )
    base_rule = Rule.Z if rule is Rule.Z_FLOOR else Rule.Z_PLUS
    best = None
    for h in spanning_supergraphs(g):
        th, _ = throttling_number(base_rule, Graph(h.n, h.adj))
        if best is None or th < best:
            best = th
    assert best is not None
    return best
