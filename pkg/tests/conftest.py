from __future__ import annotations

import random

import pytest

from mrcast.netgraph import GenParams, LayeredDag, from_edges, generate_random

# s=0, a=1, b=2, c=3, d=4, r1=5, r2=6; c-d is the shared bottleneck.
BUTTERFLY_EDGES = [(0, 1), (0, 2), (1, 5), (1, 3), (2, 3), (2, 6), (3, 4), (4, 5), (4, 6)]

# s=0, v1=1, v2=2, v3=3, r1=4, r2=5, r3=6.  Receiver min-cuts are (2, 3, 1);
# min-req requests at v1, v2, v3 come out as (2, 1, 1) and min-cut requests
# as (2, 2, 2), with minCut(v3) = 2 and minCut(v2) = 2.
THREE_RECEIVER_EDGES = [
    (0, 1), (0, 1), (0, 4), (1, 4),
    (0, 2), (0, 2), (0, 3), (2, 3),
    (3, 6),
    (1, 5), (2, 5), (3, 5),
]


def butterfly(layers: int = 2) -> LayeredDag:
    return from_edges(BUTTERFLY_EDGES, 0, [5, 6], layers)


def three_receiver(layers: int = 3) -> LayeredDag:
    return from_edges(THREE_RECEIVER_EDGES, 0, [4, 5, 6], layers)


def diamond(layers: int = 2) -> LayeredDag:
    return from_edges([(0, 1), (0, 2), (1, 3), (2, 3)], 0, [3], layers)


def chain(layers: int = 2) -> LayeredDag:
    return from_edges([(0, 1), (1, 2)], 0, [2], layers)


def random_graphs(count: int, seed: int, nodes=(15, 40), layers=(2, 3), receivers=(2, 6)):
    """Deterministic stream of generated graphs with varied parameters."""
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(*nodes)
        L = rng.choice(layers)
        k = rng.randint(receivers[0], min(receivers[1], n - 1))
        yield generate_random(GenParams(n, k, L), rng)


@pytest.fixture
def butterfly_graph() -> LayeredDag:
    return butterfly()


@pytest.fixture
def three_receiver_graph() -> LayeredDag:
    return three_receiver()


_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record (and print) one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
