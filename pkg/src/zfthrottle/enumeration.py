"""Exhaustive enumeration of small graphs up to isomorphism.

Representatives are grown one vertex at a time from the previous order's
representatives (orderly generation), so the labeled-graph explosion never
materializes.  The public entry point is capped at seven vertices; larger
corpora are expected to arrive as graph6 files.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from .canonical import canonical_form
from .errors import CapacityError, DomainError
from .graphs import Graph, is_connected

ENUMERATION_MAX = 7


def enumerate_connected(n: int) -> Iterator[Graph]:
    """One representative per isomorphism class of connected graphs on n vertices.

    Counts match 1, 1, 2, 6, 21, 112, 853 for n = 1..7 (OEIS A001349).
    """
    if n < 1:
        raise DomainError("need at least one vertex")
    if n > ENUMERATION_MAX:
        raise CapacityError(
            f"built-in enumeration stops at {ENUMERATION_MAX} vertices; "
            "ingest larger corpora from graph6 files (e.g. geng output)"
        )
    for g in _all_graphs(n):
        if is_connected(g):
            yield g


def connected_graphs(n: int) -> list[Graph]:
    return list(enumerate_connected(n))


def connected_graphs_upto(nmax: int) -> list[Graph]:
    out: list[Graph] = []
    for n in range(1, nmax + 1):
        out.extend(enumerate_connected(n))
    return out


@lru_cache(maxsize=None)
def _all_graphs(n: int) -> tuple[Graph, ...]:
    # Internal: all graphs (connected or not) on n vertices up to isomorphism,
    # sorted by canonical form.  n = 8 is reachable here because the
    # acceptance corpus for the accelerator-recognition cross-check needs it;
    # the public enumeration cap still applies to callers.
    if n > 8:
        raise CapacityError(f"graph enumeration supports up to 8 vertices, got {n}")
    if n == 1:
        return (Graph.empty(1),)
    seen: dict[bytes, Graph] = {}
    for smaller in _all_graphs(n - 1):
        for mask in range(1 << (n - 1)):
            adj = [row | ((mask >> v & 1) << (n - 1)) for v, row in enumerate(smaller.adj)]
            adj.append(mask)
            g = Graph(n, adj)
            key = canonical_form(g)
            if key not in seen:
                seen[key] = g
    return tuple(seen[key] for key in sorted(seen))
