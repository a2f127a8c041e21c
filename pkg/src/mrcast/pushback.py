"""Pushback stage: receivers' layer requests travel up toward the source.

Every receiver asks for as many layers as its min-cut allows (capped at the
layer count).  Every other node combines its children's requests with its
own min-cut through a criterion and passes one number to all its parents.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .netgraph import LayeredDag, all_min_cuts, longest_path_length


class Criterion(enum.Enum):
    MIN_REQ = "minreq"
    MIN_CUT = "mincut"


class Schedule(enum.Enum):
    SEQUENTIAL = "sequential"
    FLOODING = "flooding"


class NonQuiescenceError(RuntimeError):
    """Flooding failed to settle within its round budget."""


def _min_nonzero(requests: Iterable[int]) -> int:
    q_min = 0
    for q in requests:
        if q and (q_min == 0 or q < q_min):
            q_min = q
    return q_min


def criterion_min_req(child_requests: Iterable[int], min_cut_v: int = 0) -> int:
    """Smallest nonzero child request, or 0 when no child asks for anything."""
    return _min_nonzero(child_requests)


def criterion_min_cut(child_requests: Iterable[int], min_cut_v: int) -> int:
    """Ask for the node's own min-cut when it exceeds the smallest child request.

    Such a node can decode that many layers and serve smaller requests as a
    secondary source.  Returns 0 when every child request is 0.
    """
    q_min = _min_nonzero(child_requests)
    if q_min == 0:
        return 0
    return q_min if min_cut_v <= q_min else min_cut_v


CRITERIA: dict[Criterion, Callable[[Iterable[int], int], int]] = {
    Criterion.MIN_REQ: criterion_min_req,
    Criterion.MIN_CUT: criterion_min_cut,
}


@dataclass(frozen=True)
class RequestState:
    """Final pushback messages ``q`` and the min-cuts they were computed from.

    ``rounds`` and ``messages`` describe how the schedule got there and are
    ignored by equality.
    """

    q: tuple[int, ...]
    min_cut: tuple[int, ...]
    rounds: int = field(default=0, compare=False)
    messages: int = field(default=0, compare=False)


def run_pushback(
    g: LayeredDag,
    criterion: Criterion,
    schedule: Schedule = Schedule.SEQUENTIAL,
    min_cuts: tuple[int, ...] | None = None,
    rng: random.Random | None = None,
) -> RequestState:
    """Compute every node's request under ``criterion`` and ``schedule``.

    ``min_cuts`` may be passed in to avoid recomputing max-flows.  With
    ``Schedule.FLOODING`` and an ``rng``, messages are delivered one at a time
    in a random order instead of in synchronous rounds.
    """
    if min_cuts is None:
        min_cuts = all_min_cuts(g)
    if len(min_cuts) != g.node_count:
        raise ValueError("min_cuts length does not match the graph")
    f = CRITERIA[Criterion(criterion)]
    schedule = Schedule(schedule)
    if schedule is Schedule.SEQUENTIAL:
        q, rounds, messages = _sequential(g, f, min_cuts)
    elif rng is None:
        q, rounds, messages = _flood_rounds(g, f, min_cuts)
    else:
        q, rounds, messages = _flood_async(g, f, min_cuts, rng)
    return RequestState(tuple(q), tuple(min_cuts), rounds, messages)


def _children(g: LayeredDag, v: int) -> list[int]:
    return sorted(g.children(v))


def _parents(g: LayeredDag, v: int) -> list[int]:
    return sorted(g.parents(v))


def _local(g: LayeredDag, v: int, min_cuts) -> int | None:
    """Request a node can send before hearing anything, else ``None``."""
    if v in g.receivers:
        return min(min_cuts[v], g.layers)
    if not g.out_edges(v) or (v != g.source and min_cuts[v] == 0):
        # Unreachable nodes have nothing to forward.
        return 0
    return None


def _sequential(g, f, min_cuts):
    L = g.layers
    q = [0] * g.node_count
    messages = 0
    for v in reversed(g.topo_order()):
        local = _local(g, v, min_cuts)
        if local is None:
            local = f([q[u] for u in _children(g, v)], min(min_cuts[v], L))
        q[v] = local
        messages += len(g.parents(v))
    return q, 1, messages


def _flood_rounds(g, f, min_cuts):
    L = g.layers
    n = g.node_count
    value: list[int | None] = [None] * n
    heard: list[dict[int, int]] = [{} for _ in range(n)]
    emitting = []
    for v in range(n):
        value[v] = _local(g, v, min_cuts)
        if value[v] is not None:
            emitting.append(v)
    budget = max(1, longest_path_length(g)) * n + 1
    rounds = messages = 0
    while emitting:
        rounds += 1
        if rounds > budget:
            raise NonQuiescenceError(f"flooding still active after {budget} rounds")
        dirty = set()
        for u in emitting:
            for p in _parents(g, u):
                heard[p][u] = value[u]
                dirty.add(p)
                messages += 1
        emitting = []
        for p in sorted(dirty):
            if p in g.receivers:
                continue
            new = f(heard[p].values(), min(min_cuts[p], L))
            if new != value[p]:
                value[p] = new
                emitting.append(p)
    return [0 if x is None else x for x in value], rounds, messages


def _flood_async(g, f, min_cuts, rng):
    # Links with an undelivered update; delivery carries the child's latest
    # value, which is what per-link FIFO delivery converges to.
    L = g.layers
    n = g.node_count
    value: list[int | None] = [None] * n
    heard: list[dict[int, int]] = [{} for _ in range(n)]
    pending: list[tuple[int, int]] = []
    queued: set[tuple[int, int]] = set()

    def post(u):
        for p in _parents(g, u):
            if (u, p) not in queued:
                queued.add((u, p))
                pending.append((u, p))

    for v in range(n):
        value[v] = _local(g, v, min_cuts)
        if value[v] is not None:
            post(v)
    budget = (max(1, longest_path_length(g)) * n + 1) * max(1, len(g.edges))
    messages = 0
    while pending:
        messages += 1
        if messages > budget:
            raise NonQuiescenceError(f"flooding still active after {budget} deliveries")
        i = rng.randrange(len(pending))
        pending[i], pending[-1] = pending[-1], pending[i]
        u, p = pending.pop()
        queued.discard((u, p))
        heard[p][u] = value[u]
        if p in g.receivers:
            continue
        new = f(heard[p].values(), min(min_cuts[p], L))
        if new != value[p]:
            value[p] = new
            post(p)
    return [0 if x is None else x for x in value], 0, messages
