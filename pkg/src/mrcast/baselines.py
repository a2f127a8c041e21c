"""Comparison schemes: point-to-point routing, Steiner routing, intra-layer coding.

All three deliver one layer at a time.  A layer is offered only to receivers
that got every earlier layer and still have residual capacity toward them;
the capacity a layer uses is gone for the later layers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .netgraph import LayeredDag, max_flow

EPS = 1e-9


@dataclass(frozen=True)
class RoutingResult:
    """Layers delivered to each receiver and the edges each layer occupied.

    For intra-layer coding ``usage`` holds the fraction of each edge's
    capacity taken by the layer; for routing it is 1 on every used edge.
    """

    achieved: dict[int, int]
    edges_used: tuple[frozenset[int], ...]
    usage: tuple[dict[int, float], ...] = ()

    def achieved_list(self, g: LayeredDag) -> list[int]:
        return [self.achieved[r] for r in g.receivers]


def _distances_to(g: LayeredDag, target: int, cap, blocked=frozenset()) -> list[int | None]:
    """BFS hop distance from every node to ``target`` over edges with capacity."""
    dist: list[int | None] = [None] * g.node_count
    dist[target] = 0
    queue = deque([target])
    while queue:
        w = queue.popleft()
        for e in g.in_edges(w):
            if cap[e] < 1 or e in blocked:
                continue
            u = g.edges[e][0]
            if dist[u] is None:
                dist[u] = dist[w] + 1
                queue.append(u)
    return dist


def _walk(g: LayeredDag, start: int, dist, cap, blocked=frozenset()) -> list[int]:
    """Edges of the lexicographically smallest shortest path down ``dist``.

    Among parallel edges the lowest id is taken.
    """
    path = []
    v = start
    while dist[v] != 0:
        best = None
        for e in g.out_edges(v):
            if cap[e] < 1 or e in blocked:
                continue
            w = g.edges[e][1]
            if dist[w] is not None and dist[w] == dist[v] - 1:
                if best is None or (w, e) < best:
                    best = (w, e)
        path.append(best[1])
        v = best[0]
    return path


def shortest_path(g: LayeredDag, target: int, cap) -> list[int] | None:
    """Shortest source-to-``target`` path (edge ids) over edges with capacity."""
    dist = _distances_to(g, target, cap)
    if dist[g.source] is None:
        return None
    return _walk(g, g.source, dist, cap)


def _initial(g: LayeredDag) -> tuple[dict[int, int], list[int]]:
    return {r: 0 for r in g.receivers}, list(g.receivers)


def route_pt2pt(g: LayeredDag) -> RoutingResult:
    """Each layer goes out on the union of per-receiver shortest paths."""
    cap = [1] * len(g.edges)
    achieved, eligible = _initial(g)
    used_per_layer = []
    for _ in range(g.layers):
        union: set[int] = set()
        served = []
        for r in eligible:
            path = shortest_path(g, r, cap)
            if path is not None:
                union.update(path)
                served.append(r)
        if not served:
            break
        for e in union:
            cap[e] -= 1
        for r in served:
            achieved[r] += 1
        used_per_layer.append(frozenset(union))
        eligible = served
    return RoutingResult(achieved, tuple(used_per_layer))


def steiner_tree(g: LayeredDag, terminals: list[int], cap) -> tuple[set[int], list[int]]:
    """Incremental shortest-path heuristic for a directed Steiner tree.

    Starting from the source, repeatedly attach the terminal closest to the
    current tree (ties to the lowest node id) along a shortest path.
    Returns the tree's edge set and the terminals it reached.
    """
    in_tree = {g.source}
    tree_edges: set[int] = set()
    # Edges into tree nodes would give a node a second parent.
    blocked: set[int] = set(g.in_edges(g.source))
    remaining = sorted(set(terminals))
    reached = []
    while remaining:
        best = None
        for t in remaining:
            if t in in_tree:
                best = (0, t, None, None)
                break
            dist = _distances_to(g, t, cap, blocked)
            starts = [(dist[w], w) for w in in_tree if dist[w] is not None]
            if not starts:
                continue
            d, w = min(starts)
            if best is None or (d, t) < best[:2]:
                best = (d, t, w, dist)
        if best is None:
            break
        d, t, w, dist = best
        remaining.remove(t)
        reached.append(t)
        if d == 0:
            continue
        for e in _walk(g, w, dist, cap, blocked):
            tree_edges.add(e)
            head = g.edges[e][1]
            in_tree.add(head)
            blocked.update(g.in_edges(head))
    return tree_edges, reached


def route_steiner(g: LayeredDag) -> RoutingResult:
    """Each layer goes out on a heuristic Steiner tree over eligible receivers."""
    cap = [1] * len(g.edges)
    achieved, eligible = _initial(g)
    used_per_layer = []
    for _ in range(g.layers):
        tree, reached = steiner_tree(g, eligible, cap)
        if not reached:
            break
        for e in tree:
            cap[e] -= 1
        served = [r for r in eligible if r in set(reached)]
        for r in served:
            achieved[r] += 1
        used_per_layer.append(frozenset(tree))
        eligible = served
    return RoutingResult(achieved, tuple(used_per_layer))


def min_cost_flow(g: LayeredDag, sink: int, cap: list[float], target: float, cost) -> tuple[float, list[float]]:
    """Successive shortest paths (Bellman-Ford) for up to ``target`` units.

    ``cost(e)`` is the per-unit cost of edge ``e``; costs may be fractional
    and capacities fractional.  Returns the flow value and per-edge flow.
    """
    n = g.node_count
    edges = g.edges
    costs = [cost(e) for e in range(len(edges))]
    flow = [0.0] * len(edges)
    value = 0.0
    while value < target - EPS:
        dist: list[float | None] = [None] * n
        pred: list[tuple[int, int] | None] = [None] * n
        dist[g.source] = 0.0
        for _ in range(n):
            changed = False
            for e, (u, v) in enumerate(edges):
                c = costs[e]
                du, dv = dist[u], dist[v]
                if du is not None and cap[e] - flow[e] > EPS and (dv is None or du + c < dv - 1e-12):
                    dist[v] = du + c
                    pred[v] = (e, 1)
                    changed = True
                    dv = dist[v]
                if dv is not None and flow[e] > EPS and (du is None or dv - c < du - 1e-12):
                    dist[u] = dv - c
                    pred[u] = (e, -1)
                    changed = True
            if not changed:
                break
        if dist[sink] is None:
            break
        path = []
        x = sink
        while x != g.source:
            e, d = pred[x]
            path.append((e, d))
            x = edges[e][0] if d == 1 else edges[e][1]
        push = min(min(cap[e] - flow[e] if d == 1 else flow[e] for e, d in path), target - value)
        for e, d in path:
            flow[e] += push * d
        value += push
    return value, flow


def _reserve(z: dict[int, float], flow: list[float], value: float) -> None:
    if value <= EPS:
        return
    for e, x in enumerate(flow):
        if x > EPS:
            share = x / value
            if share > z.get(e, 0.0):
                z[e] = share


def _by_remaining(served, remaining):
    return sorted(served, key=lambda r: (remaining[r], r))


def _congestion_subgraph(g, cap, served, remaining, flows, beta=3.0):
    """Unit flows at least cost, reusing capacity already reserved for free.

    New reservations cost ``1 + beta * k`` where ``k`` counts receivers
    without spare residual capacity whose max-flow crosses the edge.
    Receivers with the fewest remaining layers are routed first.
    """
    pressure = [0] * len(g.edges)
    for r in served:
        value, flow = flows[r]
        if value < remaining[r] + EPS:
            for e, x in enumerate(flow):
                if x > EPS:
                    pressure[e] += 1
    z: dict[int, float] = {}
    for r in _by_remaining(served, remaining):
        value, flow = min_cost_flow(
            g, r, cap, 1.0, lambda e: 0.0 if z.get(e, 0.0) >= 1 - EPS else 1.0 + beta * pressure[e]
        )
        _reserve(z, flow, value)
    return z


def _split_subgraph(g, cap, served, remaining, flows):
    """Each receiver spreads the layer evenly over as many disjoint routes as
    it still has layers to receive, so coded halves/thirds share links."""
    z: dict[int, float] = {}
    for r in _by_remaining(served, remaining):
        want = max(1, min(remaining[r], int(flows[r][0] + EPS)))
        value, flow = min_cost_flow(
            g, r, cap, want, lambda e: 0.0 if z.get(e, 0.0) >= 1.0 / want - EPS else 1.0
        )
        _reserve(z, flow, value)
    return z


def _tree_subgraph(g, cap, served, remaining, flows):
    whole = [1 if c >= 1 - EPS else 0 for c in cap]
    tree, reached = steiner_tree(g, served, whole)
    if len(reached) < len(served):
        return None
    return {e: 1.0 for e in tree}


_CANDIDATES = (_congestion_subgraph, _split_subgraph, _tree_subgraph)


def route_intra_layer(g: LayeredDag, demand: dict[int, int] | None = None) -> RoutingResult:
    """Layer-by-layer coded multicast on fractional flow subgraphs.

    Layer ``i`` goes to the eligible receivers whose residual max-flow is at
    least one unit.  Coding within the layer means any subgraph holding a
    unit flow to each of them carries the layer; the capacity reserved on an
    edge is the largest share any receiver's flow puts there.  Three
    candidate subgraphs are built (congestion-weighted least-cost flows,
    evenly split flows, a Steiner tree) and the one leaving the most residual
    capacity toward the receivers' remaining layers is used, with fewer
    reserved units breaking ties.

    ``demand`` maps receivers to the layer count they want; it defaults to
    ``min(min_cut, L)``.
    """
    if demand is None:
        from .netgraph import all_min_cuts

        cuts = all_min_cuts(g)
        demand = {r: min(cuts[r], g.layers) for r in g.receivers}
    cap = [1.0] * len(g.edges)
    achieved, eligible = _initial(g)
    used_per_layer = []
    usage_per_layer = []
    for layer in range(g.layers):
        flows = {}
        for r in eligible:
            value, flow = max_flow(g, r, cap, eps=EPS)
            if value >= 1 - EPS:
                flows[r] = (value, flow)
        served = [r for r in eligible if r in flows]
        if not served:
            break
        remaining = {r: demand[r] - layer for r in served}
        best = None
        for rank, build in enumerate(_CANDIDATES):
            z = build(g, cap, served, remaining, flows)
            if z is None:
                continue
            left = [max(0.0, c - z.get(e, 0.0)) for e, c in enumerate(cap)]
            keep = sum(min(max_flow(g, r, left, eps=EPS)[0], remaining[r] - 1) for r in served)
            key = (-round(keep, 9), round(sum(z.values()), 9), rank)
            if best is None or key < best[0]:
                best = (key, z, left)
        _, z, cap = best
        for r in served:
            achieved[r] += 1
        used_per_layer.append(frozenset(z))
        usage_per_layer.append(z)
        eligible = served
    return RoutingResult(achieved, tuple(used_per_layer), tuple(usage_per_layer))
