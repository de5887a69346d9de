"""Adjacency spectral radius by shifted power iteration.

Iterating on A + n*I guarantees a dominant positive eigenvalue (the shift
dwarfs the most negative adjacency eigenvalue, which is at least -(n-1)),
so bipartite +/-lambda oscillation cannot occur.  Convergence is declared
when the Rayleigh quotient moves by less than 1e-12 between iterations.
"""

from __future__ import annotations

from math import sqrt

from .enumeration import enumerate_connected
from .errors import DomainError
from .graphs import Graph, bits

RAYLEIGH_TOLERANCE = 1e-12
MAX_ITERATIONS = 100_000
SPECTRAL_TIE_TOLERANCE = 1e-7


def spectral_radius(g: Graph) -> float:
    """Largest adjacency eigenvalue, to absolute tolerance 1e-9."""
    if g.n == 0:
        raise DomainError("the empty graph has no spectrum")
    n = g.n
    shift = float(n)
    x = [1.0] * n
    rayleigh = None
    for _ in range(MAX_ITERATIONS):
        y = [shift * x[v] for v in range(n)]
        for v in range(n):
            acc = 0.0
            for u in bits(g.adj[v]):
                acc += x[u]
            y[v] += acc
        norm = sqrt(sum(val * val for val in y))
        if norm == 0.0:
            return -shift  # unreachable for the shifted matrix; defensive
        x = [val / norm for val in y]
        # Rayleigh quotient of the shifted matrix at the new unit vector
        ax = [shift * x[v] + sum(x[u] for u in bits(g.adj[v])) for v in range(n)]
        current = sum(x[v] * ax[v] for v in range(n))
        if rayleigh is not None and abs(current - rayleigh) < RAYLEIGH_TOLERANCE:
            return current - shift
        rayleigh = current
    return rayleigh - shift


def max_spectral_graphs(n: int, m: int) -> list[Graph]:
    """All connected (n, m)-graphs within 1e-7 of the maximum spectral radius."""
    if n < 1:
        raise DomainError("need at least one vertex")
    max_edges = n * (n - 1) // 2
    if m < n - 1 or m > max_edges:
        raise DomainError(f"no connected graph has {n} vertices and {m} edges")
    candidates = [g for g in enumerate_connected(n) if g.edge_count() == m]
    if not candidates:
        raise DomainError(f"no connected graph has {n} vertices and {m} edges")
    radii = [spectral_radius(g) for g in candidates]
    best = max(radii)
    if m == max_edges:
        # the unique candidate is complete; its radius is exactly n - 1
        assert abs(best - (n - 1)) < 1e-9
    return [g for g, rho in zip(candidates, radii) if rho >= best - SPECTRAL_TIE_TOLERANCE]
