"""Bit-exact graph6 encoding and decoding (McKay's format, n <= 32).

Only the one-byte size header applies below 63 vertices, so multi-byte
headers are rejected as over-capacity rather than decoded.  Parsing is
strict: every byte must lie in 63..126, the line must have exactly the
right length, and padding bits must be zero.
"""

from __future__ import annotations

from .errors import CapacityError, Graph6ParseError
from .graphs import MAX_VERTICES, Graph


def parse_graph6(line: str) -> Graph:
    """Decode a single graph6 line into a Graph."""
    text = line.rstrip("\n")
    if not text:
        raise Graph6ParseError("empty graph6 line", 0)
    data = text.encode("ascii", errors="replace")
    first = data[0]
    if first == 126:  # '~' starts a multi-byte size, so n >= 63
        raise CapacityError("graph6 size header encodes n >= 63; limit is 32 vertices")
    if not 63 <= first <= 125:
        raise Graph6ParseError(f"invalid header byte {data[0:1]!r}", 0)
    n = first - 63
    if n > MAX_VERTICES:
        raise CapacityError(f"graph6 encodes {n} vertices; limit is {MAX_VERTICES}")
    nbits = n * (n - 1) // 2
    nchars = (nbits + 5) // 6
    if len(data) < 1 + nchars:
        raise Graph6ParseError(f"truncated graph6 body; need {nchars} edge bytes", len(data))
    if len(data) > 1 + nchars:
        raise Graph6ParseError("trailing garbage after graph6 body", 1 + nchars)
    adj = [0] * n
    bit_index = 0
    for pos in range(nchars):
        byte = data[1 + pos]
        if not 63 <= byte <= 126:
            raise Graph6ParseError(f"out-of-range byte {data[1 + pos:2 + pos]!r}", 1 + pos)
        value = byte - 63
        for k in range(5, -1, -1):
            bit = value >> k & 1
            if bit_index >= nbits:
                if bit:
                    raise Graph6ParseError("nonzero padding bits", 1 + pos)
                bit_index += 1
                continue
            if bit:
                u, v = _pair_at(bit_index)
                adj[u] |= 1 << v
                adj[v] |= 1 << u
            bit_index += 1
    return Graph(n, adj)


def emit_graph6(g: Graph) -> str:
    """Encode a Graph as a graph6 line (no trailing newline)."""
    if g.n > MAX_VERTICES:
        raise CapacityError(f"cannot encode {g.n} vertices")
    out = [chr(63 + g.n)]
    acc = 0
    filled = 0
    for v in range(1, g.n):
        for u in range(v):
            acc = (acc << 1) | (g.adj[u] >> v & 1)
            filled += 1
            if filled == 6:
                out.append(chr(63 + acc))
                acc, filled = 0, 0
    if filled:
        acc <<= 6 - filled
        out.append(chr(63 + acc))
    return "".join(out)


def _pair_at(bit_index: int) -> tuple[int, int]:
    # graph6 orders the upper triangle column by column: (0,1), (0,2), (1,2), ...
    v = 1
    while v * (v - 1) // 2 + v <= bit_index:
        v += 1
    u = bit_index - v * (v - 1) // 2
    return u, v


def read_graph6_file(text: str) -> list[Graph]:
    """Parse a graph6 file, one graph per line; the optional format header is skipped."""
    graphs = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">>graph6<<"):
            line = line[len(">>graph6<<"):]
            if not line:
                continue
        graphs.append(parse_graph6(line))
    return graphs
