"""Code assignment stage: top-down random linear codes driven by the requests.

A code on an edge is a coding vector of length L (one coefficient per layer)
tagged with its declared span ``m``: it mixes layers ``1..m`` only.  Nodes
are visited in topological order.  Each node works out how many leading
layers it can decode (``m_star``) and then, per child ``u``:

* ``q(u) <= m_star``: the node re-encodes freshly over layers ``1..q(u)``;
* otherwise it forwards a random combination of the incoming codes whose
  span does not exceed ``q(u)``, mixed with fresh combinations of the layers
  it has decoded.

Only coding vectors are tracked, never payloads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .gf import Field, FieldSpec, field
from .netgraph import LayeredDag
from .pushback import RequestState


def span_of(vector: Sequence[int]) -> int:
    """1-based index of the last nonzero coefficient; 0 for the zero vector."""
    for i in range(len(vector) - 1, -1, -1):
        if vector[i]:
            return i + 1
    return 0


@dataclass(frozen=True)
class EdgeCode:
    edge: int
    m: int
    vector: tuple[int, ...]

    @property
    def span(self) -> int:
        return span_of(self.vector)

    def to_line(self) -> str:
        return f"edge {self.edge} m {self.m} vec " + " ".join(str(c) for c in self.vector)


@dataclass(frozen=True)
class DecodeState:
    """Codes received by every node and the decodable prefix at each node."""

    received: tuple[tuple[EdgeCode, ...], ...]
    m_star: tuple[int, ...]


def _row_basis(vectors: Iterable[Sequence[int]], L: int, fld: Field) -> dict[int, list[int]]:
    """Echelon basis keyed by each row's highest nonzero position (0-based).

    Elimination runs from the last layer down, so the rows whose key is below
    ``m`` span exactly the part of the row space supported on layers ``1..m``.
    """
    basis: dict[int, list[int]] = {}
    mul, sub = fld.mul, fld.sub
    for vec in vectors:
        v = list(vec)
        for j in range(L - 1, -1, -1):
            c = v[j]
            if not c:
                continue
            b = basis.get(j)
            if b is None:
                ic = fld.inv(c)
                basis[j] = [mul(x, ic) for x in v]
                break
            v = [sub(x, mul(c, y)) for x, y in zip(v, b)]
    return basis


def rank(vectors: Iterable[Sequence[int]], L: int, f: FieldSpec) -> int:
    return len(_row_basis(vectors, L, field(f)))


def decodable_prefix(codes: Iterable[EdgeCode | Sequence[int]], L: int, f: FieldSpec) -> int:
    """Largest ``m`` such that layers ``1..m`` are recoverable from ``codes``.

    Layer ``j`` is recoverable iff the unit vector ``e_j`` lies in the row
    span, which for the echelon basis above means position ``j`` is a pivot.
    """
    vectors = [c.vector if isinstance(c, EdgeCode) else c for c in codes]
    for v in vectors:
        if len(v) != L:
            raise ValueError(f"coding vector of length {len(v)} with L={L}")
    basis = _row_basis(vectors, L, field(f))
    m = 0
    while m in basis:
        m += 1
    return m


def pattern_decodable_2layer(spans: Iterable[int], min_cut_v: int) -> int:
    """Decodable prefix of a two-layer node read off the spans of its codes.

    Valid for a generic (infinite) field.  Zero spans are idle edges.  A
    span-1 code delivers layer 1; with it, any span-2 code delivers layer 2.
    Without a span-1 code both layers need two independent span-2 codes,
    which requires two of them and a min-cut of at least 2.
    """
    spans = [s for s in spans if s]
    if any(s > 2 or s < 0 for s in spans):
        raise ValueError("two-layer spans must lie in 0..2")
    ones = spans.count(1)
    twos = spans.count(2)
    if ones:
        return 2 if twos else 1
    if twos >= 2 and min_cut_v >= 2:
        return 2
    return 0


def _fresh(m: int, L: int, fld: Field, rng: random.Random) -> list[int]:
    # Nonzero coefficients: a fresh code on layers 1..m really covers all m.
    return [fld.random(rng, nonzero=True) for _ in range(m)] + [0] * (L - m)


def _combine(vectors: Sequence[Sequence[int]], L: int, fld: Field, rng: random.Random) -> list[int]:
    out = [0] * L
    add, mul = fld.add, fld.mul
    for vec in vectors:
        a = fld.random(rng)
        if a:
            out = [add(x, mul(a, y)) for x, y in zip(out, vec)]
    return out


def assign_codes(
    g: LayeredDag, req: RequestState, f: FieldSpec, rng: random.Random
) -> tuple[tuple[EdgeCode, ...], DecodeState]:
    """Generate a code for every edge and the decodable prefix at every node.

    Returns the per-edge codes (indexed by edge id) and the decode state.
    The source's ``m_star`` is ``L``; nodes without parents other than the
    source have ``m_star`` 0 and send zero codes.
    """
    if len(req.q) != g.node_count or len(req.min_cut) != g.node_count:
        raise ValueError("request state does not match the graph")
    L = g.layers
    fld = field(f)
    q = req.q
    zero = (0,) * L
    codes: list[EdgeCode | None] = [None] * len(g.edges)
    received: list[tuple[EdgeCode, ...]] = [()] * g.node_count
    m_star = [0] * g.node_count
    for v in g.topo_order():
        out = g.out_edges(v)
        if v == g.source:
            m_star[v] = L
            for e in out:
                k = q[g.edges[e][1]]
                codes[e] = EdgeCode(e, k, tuple(_fresh(k, L, fld, rng)))
            continue
        incoming = tuple(codes[e] for e in g.in_edges(v))
        received[v] = incoming
        if not incoming:
            for e in out:
                codes[e] = EdgeCode(e, 0, zero)
            continue
        ms = decodable_prefix(incoming, L, f)
        m_star[v] = ms
        for e in out:
            k = q[g.edges[e][1]]
            if k <= ms:
                codes[e] = EdgeCode(e, k, tuple(_fresh(k, L, fld, rng)))
                continue
            usable = [c for c in incoming if 0 < c.m <= k]
            m_max = max((c.m for c in usable), default=0)
            m_max = max(m_max, ms)
            if m_max == 0:
                codes[e] = EdgeCode(e, 0, zero)
                continue
            vec = _combine([c.vector for c in usable], L, fld, rng)
            if ms:
                vec = [fld.add(x, y) for x, y in zip(vec, _fresh(ms, L, fld, rng))]
            codes[e] = EdgeCode(e, m_max, tuple(vec))
    return tuple(codes), DecodeState(tuple(received), tuple(m_star))


def dump_codes(codes: Iterable[EdgeCode]) -> str:
    """One ``edge <id> m <span> vec <c1> ... <cL>`` line per edge."""
    return "".join(c.to_line() + "\n" for c in codes)


def parse_codes(text: str) -> list[EdgeCode]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) < 5 or line[0] != "edge" or line[2] != "m" or line[4] != "vec":
            raise ValueError(f"malformed code line: {raw!r}")
        out.append(EdgeCode(int(line[1]), int(line[3]), tuple(int(x) for x in line[5:])))
    return out


@dataclass(frozen=True)
class SortedCodingMatrix:
    """Received codes sorted by ascending span, with nested block corners.

    Block ``i`` is the upper-left submatrix made of every row whose span is at
    most ``cols[i]``; it has ``rows[i]`` rows.
    """

    matrix: tuple[tuple[int, ...], ...]
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def block(self, i: int) -> list[list[int]]:
        return [list(r[: self.cols[i]]) for r in self.matrix[: self.rows[i]]]


def sorted_coding_matrix(vectors: Iterable[Sequence[int]]) -> SortedCodingMatrix:
    rows = sorted((tuple(v) for v in vectors), key=span_of)
    spans = [span_of(r) for r in rows]
    cols = sorted(set(spans))
    counts = tuple(sum(1 for s in spans if s <= c) for c in cols)
    return SortedCodingMatrix(tuple(rows), counts, tuple(cols))


def random_span_vector(span: int, L: int, f: FieldSpec, rng: random.Random) -> tuple[int, ...]:
    """Vector whose first ``span`` coefficients are nonzero random, rest zero."""
    fld = field(f)
    return tuple(fld.random(rng, nonzero=True) for _ in range(span)) + (0,) * (L - span)


def lemma1_matrix_check(codes: Sequence[Sequence[int] | EdgeCode], f: FieldSpec) -> bool:
    """True iff ``n`` codes of span at most ``n`` let the node decode layer 1.

    With independent random coefficients this holds except with probability
    roughly ``n * n / |F|``.
    """
    n = len(codes)
    vectors = [c.vector if isinstance(c, EdgeCode) else tuple(c) for c in codes]
    if any(span_of(v) > n for v in vectors):
        raise ValueError("every code must span at most n layers")
    L = max((len(v) for v in vectors), default=0)
    return decodable_prefix([tuple(v) + (0,) * (L - len(v)) for v in vectors], L, f) >= 1
