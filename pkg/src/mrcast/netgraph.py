"""Directed acyclic multicast networks with unit-capacity links.

A :class:`LayeredDag` is immutable.  Links of capacity greater than one are
parallel edges; every edge has its own id so parallel copies stay distinct.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class GraphError(ValueError):
    """Invalid graph: cycle, bad ids, malformed network file."""


class GenerationError(RuntimeError):
    """Random generation could not satisfy its constraints."""


@dataclass(frozen=True)
class LayeredDag:
    node_count: int
    edges: tuple[tuple[int, int], ...]
    source: int
    receivers: tuple[int, ...]
    layers: int
    _in: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _out: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _topo: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.node_count
        if n < 1:
            raise GraphError("graph needs at least one node")
        if self.layers < 1:
            raise GraphError("layer count must be positive")
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "receivers", tuple(int(r) for r in self.receivers))
        if not 0 <= self.source < n:
            raise GraphError(f"source {self.source} out of range")
        ins: list[list[int]] = [[] for _ in range(n)]
        outs: list[list[int]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {eid} ({u}, {v}) has an out-of-range endpoint")
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            outs[u].append(eid)
            ins[v].append(eid)
        if ins[self.source]:
            raise GraphError("source must not have incoming edges")
        if len(set(self.receivers)) != len(self.receivers):
            raise GraphError("duplicate receiver")
        for r in self.receivers:
            if not 0 <= r < n:
                raise GraphError(f"receiver {r} out of range")
            if r == self.source:
                raise GraphError("source cannot be a receiver")
        object.__setattr__(self, "_in", tuple(tuple(x) for x in ins))
        object.__setattr__(self, "_out", tuple(tuple(x) for x in outs))
        object.__setattr__(self, "_topo", _kahn(self))

    def in_edges(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_edges(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def parents(self, v: int) -> frozenset[int]:
        return frozenset(self.edges[e][0] for e in self._in[v])

    def children(self, v: int) -> frozenset[int]:
        return frozenset(self.edges[e][1] for e in self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def is_receiver(self, v: int) -> bool:
        return v in self.receivers

    def topo_order(self) -> tuple[int, ...]:
        return self._topo

    def to_text(self) -> str:
        """Serialize to the line-oriented network file format."""
        lines = [
            f"layers {self.layers}",
            f"nodes {self.node_count}",
            f"source {self.source}",
            "receivers " + " ".join(str(r) for r in self.receivers),
        ]
        lines.extend(f"edge {u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"


def _kahn(g: LayeredDag) -> tuple[int, ...]:
    indeg = [len(x) for x in g._in]
    ready = [v for v in range(g.node_count) if indeg[v] == 0]
    ready.sort(reverse=True)
    order = []
    # Pop smallest id first so the order is deterministic.
    while ready:
        v = ready.pop()
        order.append(v)
        for e in g._out[v]:
            w = g.edges[e][1]
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
                ready.sort(reverse=True)
    if len(order) != g.node_count:
        raise GraphError("graph contains a cycle")
    return tuple(order)


def topo_order(g: LayeredDag) -> tuple[int, ...]:
    """Nodes ordered so that every edge points forward."""
    return g.topo_order()


def parents(g: LayeredDag, v: int) -> frozenset[int]:
    return g.parents(v)


def children(g: LayeredDag, v: int) -> frozenset[int]:
    return g.children(v)


def in_edges(g: LayeredDag, v: int) -> tuple[int, ...]:
    return g.in_edges(v)


def out_edges(g: LayeredDag, v: int) -> tuple[int, ...]:
    return g.out_edges(v)


def max_flow(
    g: LayeredDag,
    sink: int,
    capacity: list[float] | None = None,
    eps: float = 1e-12,
) -> tuple[float, list[float]]:
    """Edmonds-Karp max-flow from the source to ``sink``.

    ``capacity`` defaults to one unit per edge.  Returns the flow value and
    the per-edge flow.  Augmenting paths are found by BFS that scans edges in
    id order, so results are deterministic.
    """
    if sink == g.source:
        raise ValueError("sink must differ from the source")
    cap = [1] * len(g.edges) if capacity is None else capacity
    flow = [0] * len(g.edges)
    total = 0
    s = g.source
    edges = g.edges
    while True:
        # pred[v] = (edge id, +1 forward / -1 backward)
        pred: list[tuple[int, int] | None] = [None] * g.node_count
        pred[s] = (-1, 0)
        queue = deque([s])
        while queue and pred[sink] is None:
            u = queue.popleft()
            for e in g._out[u]:
                w = edges[e][1]
                if pred[w] is None and cap[e] - flow[e] > eps:
                    pred[w] = (e, 1)
                    queue.append(w)
            for e in g._in[u]:
                w = edges[e][0]
                if pred[w] is None and flow[e] > eps:
                    pred[w] = (e, -1)
                    queue.append(w)
        if pred[sink] is None:
            return total, flow
        path = []
        v = sink
        while v != s:
            e, d = pred[v]
            path.append((e, d))
            v = edges[e][0] if d == 1 else edges[e][1]
        push = min(cap[e] - flow[e] if d == 1 else flow[e] for e, d in path)
        for e, d in path:
            flow[e] += push * d
        total += push


def min_cut(g: LayeredDag, v: int) -> int:
    """Number of edge-disjoint source-to-``v`` paths (0 iff unreachable)."""
    if v == g.source:
        raise ValueError("min_cut is undefined for the source itself")
    value, _ = max_flow(g, v)
    return int(value)


def all_min_cuts(g: LayeredDag) -> tuple[int, ...]:
    """Min-cut of every node; the source's entry is 0 by convention."""
    return tuple(0 if v == g.source else min_cut(g, v) for v in range(g.node_count))


def levels(g: LayeredDag) -> dict[int, int | None]:
    """Longest-path distance from the source; ``None`` marks unreachable nodes."""
    lvl: dict[int, int | None] = {v: None for v in range(g.node_count)}
    lvl[g.source] = 0
    for v in g.topo_order():
        if lvl[v] is None:
            continue
        for e in g._out[v]:
            w = g.edges[e][1]
            if lvl[w] is None or lvl[w] < lvl[v] + 1:
                lvl[w] = lvl[v] + 1
    return lvl


def longest_path_length(g: LayeredDag) -> int:
    """Edge count of the longest directed path anywhere in the graph."""
    depth = [0] * g.node_count
    for v in g.topo_order():
        for e in g._out[v]:
            w = g.edges[e][1]
            depth[w] = max(depth[w], depth[v] + 1)
    return max(depth, default=0)


def reachable(g: LayeredDag, start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for e in g._out[u]:
            w = g.edges[e][1]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


@dataclass(frozen=True)
class GenParams:
    """Random network parameters.

    ``max_in_degree`` and ``max_min_cut`` default to the layer count, which
    is how the reference experiments bound both quantities.
    """

    node_count: int
    receiver_count: int
    layers: int
    max_in_degree: int | None = None
    max_min_cut: int | None = None
    seed: int = 0

    @property
    def in_degree_cap(self) -> int:
        return self.layers if self.max_in_degree is None else self.max_in_degree

    @property
    def min_cut_cap(self) -> int:
        return self.layers if self.max_min_cut is None else self.max_min_cut


def generate_random(
    params: GenParams, rng: random.Random | None = None, max_retries: int = 100
) -> LayeredDag:
    """Draw a random layered DAG.

    Nodes get a random topological rank (rank 0 is the source).  The node of
    rank ``i`` draws an in-degree uniformly from ``1..max_in_degree``
    (capped by ``i``) and that many distinct tails among earlier ranks.
    Receivers are a uniform sample of the non-source nodes.  Draws that leave
    a receiver unreachable or a node above ``max_min_cut`` are rejected and
    retried.
    """
    if params.receiver_count < 1 or params.receiver_count >= params.node_count:
        raise GenerationError(
            f"need 1 <= receivers < nodes, got {params.receiver_count} and {params.node_count}"
        )
    if params.in_degree_cap < 1 or params.layers < 1:
        raise GenerationError("max_in_degree and layers must be positive")
    if rng is None:
        rng = random.Random(params.seed)
    n = params.node_count
    dmax = params.in_degree_cap
    for _ in range(max_retries):
        ids = list(range(n))
        rng.shuffle(ids)
        edges = []
        for rank in range(1, n):
            k = min(rng.randint(1, dmax), rank)
            for tail_rank in sorted(rng.sample(range(rank), k)):
                edges.append((ids[tail_rank], ids[rank]))
        source = ids[0]
        receivers = tuple(rng.sample(ids[1:], params.receiver_count))
        g = LayeredDag(n, tuple(edges), source, receivers, params.layers)
        if _satisfies_caps(g, params):
            return g
    raise GenerationError(f"no valid network after {max_retries} attempts (params={params})")


def _satisfies_caps(g: LayeredDag, params: GenParams) -> bool:
    # min_cut(v) <= in_degree(v), so the full check is only needed when the
    # in-degree cap is looser than the min-cut cap.
    if params.in_degree_cap > params.min_cut_cap:
        cuts = all_min_cuts(g)
        if max(cuts) > params.min_cut_cap:
            return False
        return all(cuts[r] >= 1 for r in g.receivers)
    live = reachable(g, g.source)
    return all(r in live for r in g.receivers)


def parse_network(text: str) -> LayeredDag:
    """Parse the line-oriented network file format."""
    header: dict[str, list[str]] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "edge":
            if len(rest) != 2:
                raise GraphError(f"line {lineno}: edge needs two endpoints")
            edges.append((_int(rest[0], lineno), _int(rest[1], lineno)))
        elif key in ("layers", "nodes", "source", "receivers"):
            if key in header:
                raise GraphError(f"line {lineno}: duplicate '{key}'")
            header[key] = rest
        else:
            raise GraphError(f"line {lineno}: unknown directive {key!r}")
    for key in ("layers", "nodes", "source", "receivers"):
        if key not in header:
            raise GraphError(f"missing '{key}' line")
    for key in ("layers", "nodes", "source"):
        if len(header[key]) != 1:
            raise GraphError(f"'{key}' takes exactly one value")
    return LayeredDag(
        node_count=_int(header["nodes"][0], 2),
        edges=tuple(edges),
        source=_int(header["source"][0], 3),
        receivers=tuple(_int(r, 4) for r in header["receivers"]),
        layers=_int(header["layers"][0], 1),
    )


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphError(f"line {lineno}: expected an integer, got {tok!r}") from None


def load_network(path: str | Path) -> LayeredDag:
    return parse_network(Path(path).read_text())


def save_network(g: LayeredDag, path: str | Path) -> None:
    Path(path).write_text(g.to_text())


def from_edges(
    edges: Iterable[tuple[int, int]],
    source: int,
    receivers: Iterable[int],
    layers: int,
    node_count: int | None = None,
) -> LayeredDag:
    """Convenience constructor that infers ``node_count`` from the edges."""
    edges = tuple(edges)
    receivers = tuple(receivers)
    if node_count is None:
        ids = [source, *receivers, *(x for e in edges for x in e)]
        node_count = max(ids) + 1
    return LayeredDag(node_count, edges, source, receivers, layers)
