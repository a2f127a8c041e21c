"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Statistical criteria run the full trial counts at fixed seeds, so results
are reproducible run to run.
"""

from __future__ import annotations

import random
import time
from dataclasses import replace

from mrcast.cli import main
from mrcast.codeassign import assign_codes, decodable_prefix, pattern_decodable_2layer
from mrcast.gf import PRIMITIVE_POLYS, FieldSpec, field, poly_bits
from mrcast.harness import (
    PB_MINCUT,
    PB_MINREQ,
    TrialConfig,
    Variant,
    pct_happy,
    pct_rate_exact,
    result_from_pairs,
    run_cell,
)
from mrcast.netgraph import GenParams, all_min_cuts, generate_random, min_cut
from mrcast.pushback import Criterion, Schedule, run_pushback
from oracles import brute_decodable_prefix, brute_inverse, brute_min_cut, poly_mulmod

INF = FieldSpec(None)
SEED = 2024
TRIALS = 1000
FIELD_SWEEP_NET = GenParams(25, 5, 2)


def _graph_stream(count: int, seed: int, layers=(2, 3), nodes=(15, 40)):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(*nodes)
        L = rng.choice(layers)
        k = rng.randint(2, min(9, n - 1))
        yield generate_random(GenParams(n, k, L), rng), rng


def _happy(cfg: TrialConfig, variants) -> dict[Variant, float]:
    return {v: m.pct_happy for v, m in run_cell(cfg, variants).items()}


def test_base_layer_and_span_audit(report):
    start = time.perf_counter()
    trials = 10_000
    receivers = failures = violations = codes_checked = 0
    for g, rng in _graph_stream(trials, seed=SEED):
        cuts = all_min_cuts(g)
        for criterion in Criterion:
            for schedule in Schedule:
                req = run_pushback(g, criterion, schedule, min_cuts=cuts)
                codes, dec = assign_codes(g, req, INF, rng)
                receivers += len(g.receivers)
                failures += sum(1 for r in g.receivers if dec.m_star[r] < 1)
                for c in codes:
                    codes_checked += 1
                    q_child = req.q[g.edges[c.edge][1]]
                    violations += not (c.span <= c.m <= q_child)
    elapsed = time.perf_counter() - start
    ok1 = failures == 0 and elapsed < 120
    report(1, "every receiver decodes layer 1", ok1,
           f"{trials} trials x 4 variants, {receivers} receivers, {failures} failures, {elapsed:.1f}s")
    report(2, "code spans within child requests", violations == 0,
           f"{codes_checked} edge codes, {violations} with span above the child's request")
    assert ok1 and violations == 0


def test_schedule_equivalence(report):
    mismatches = compared = 0
    for g, rng in _graph_stream(1000, seed=SEED + 3):
        cuts = all_min_cuts(g)
        for criterion in Criterion:
            seq = run_pushback(g, criterion, Schedule.SEQUENTIAL, min_cuts=cuts)
            rounds = run_pushback(g, criterion, Schedule.FLOODING, min_cuts=cuts)
            shuffled = run_pushback(g, criterion, Schedule.FLOODING, min_cuts=cuts, rng=rng)
            compared += 2
            mismatches += (rounds != seq) + (shuffled != seq)
    report(3, "flooding equals sequential", mismatches == 0,
           f"{compared} comparisons on 1000 graphs, {mismatches} mismatches")
    assert mismatches == 0


def test_two_layer_pattern_equivalence(report):
    mismatches = checked = 0
    for g, rng in _graph_stream(1000, seed=SEED + 4, layers=(2,)):
        cuts = all_min_cuts(g)
        for criterion in Criterion:
            req = run_pushback(g, criterion, min_cuts=cuts)
            _, dec = assign_codes(g, req, INF, rng)
            for v in range(g.node_count):
                if v == g.source or not dec.received[v]:
                    continue
                spans = [c.m for c in dec.received[v]]
                gj = decodable_prefix(dec.received[v], 2, INF)
                checked += 1
                mismatches += pattern_decodable_2layer(spans, cuts[v]) != gj
    report(4, "2-layer pattern rule equals elimination", mismatches == 0,
           f"{checked} node code sets, {mismatches} mismatches")
    assert mismatches == 0


def test_field_size_saturation(report):
    base = TrialConfig(FIELD_SWEEP_NET, trials=TRIALS, base_seed=SEED)
    happy = {
        bits: _happy(replace(base, field=FieldSpec(bits)), [PB_MINCUT])[PB_MINCUT]
        for bits in (1, 8, 10, 12, None)
    }
    inf = happy[None]
    near = all(abs(happy[b] - inf) <= 2 for b in (8, 10, 12))
    ok = near and happy[1] < happy[10]
    detail = ", ".join(f"{'inf' if b is None else f'2^{b}'}={v:.2f}" for b, v in happy.items())
    report(5, "PB-MinCut saturates with field size", ok, detail)
    assert ok


def test_small_field_crossover(report):
    base = TrialConfig(FIELD_SWEEP_NET, trials=TRIALS, base_seed=SEED)
    parts = []
    ok = True
    for bits in (1, 3):
        h = _happy(replace(base, field=FieldSpec(bits)), [PB_MINCUT, PB_MINREQ])
        ok &= h[PB_MINREQ] >= h[PB_MINCUT] - 1
        parts.append(f"2^{bits}: minreq={h[PB_MINREQ]:.2f} mincut={h[PB_MINCUT]:.2f}")
    report(6, "MinReq >= MinCut at small fields (+1 pt)", ok, "; ".join(parts))
    assert ok


def test_scheme_ordering(report):
    cfg = TrialConfig(GenParams(25, 9, 3), field=FieldSpec(12), trials=TRIALS, base_seed=SEED)
    pt2pt, steiner, intra = Variant("pt2pt"), Variant("steiner"), Variant("intralayer")
    h = _happy(cfg, [PB_MINCUT, intra, steiner, pt2pt])
    ok = (
        h[PB_MINCUT] > h[intra] > max(h[steiner], h[pt2pt])
        and h[PB_MINCUT] - h[intra] >= 5
    )
    detail = " ".join(f"{v.label}={x:.2f}" for v, x in h.items())
    report(7, "PB-MinCut > intralayer > routing, gap >= 5", ok, detail)
    assert ok


def test_min_req_degrades_with_nodes(report):
    base = TrialConfig(GenParams(15, 3, 2), trials=TRIALS, base_seed=SEED)
    req, cut = [], []
    for n in (15, 25, 40, 60):
        h = _happy(replace(base, gen=replace(base.gen, node_count=n)), [PB_MINCUT, PB_MINREQ])
        req.append(h[PB_MINREQ])
        cut.append(h[PB_MINCUT])
    non_increasing = all(b <= a + 2 for a, b in zip(req, req[1:]))
    steady = all(max(cut) - x <= 3 for x in cut)
    ok = non_increasing and steady
    report(8, "MinReq non-increasing in nodes, MinCut steady", ok,
           f"minreq={[round(x, 2) for x in req]} mincut={[round(x, 2) for x in cut]}")
    assert ok


def test_metric_fixtures(report):
    a = result_from_pairs([1, 1, 2], [1, 1, 1])
    b = result_from_pairs([2, 2, 3], [2, 2, 2])
    rate_a = f"{float(pct_rate_exact([a])):.2f}"
    rate_b = f"{float(pct_rate_exact([b])):.2f}"
    happy_a = f"{pct_happy([a]):.2f}"
    ok = (rate_a, rate_b, happy_a) == ("75.00", "85.71", "66.67")
    report(9, "metric fixtures", ok, f"rate {rate_a} and {rate_b}, happy {happy_a}")
    assert ok


def test_oracle_suites(report):
    rng = random.Random(SEED)
    cut_mismatch = graphs = 0
    while graphs < 200:
        n = rng.randint(4, 12)
        g = generate_random(GenParams(n, rng.randint(1, n - 1), 3), rng)
        graphs += 1
        for v in range(n):
            if v != g.source:
                cut_mismatch += min_cut(g, v) != brute_min_cut(g, v, max_size=g.in_degree(v))

    gf8 = FieldSpec(3)
    poly = poly_bits(PRIMITIVE_POLYS[3])
    dec_mismatch = 0
    for _ in range(500):
        vecs = []
        for _ in range(rng.randint(1, 5)):
            span = rng.randint(0, 3)
            vecs.append(tuple(rng.randrange(8) if i < span else 0 for i in range(3)))
        dec_mismatch += decodable_prefix(vecs, 3, gf8) != brute_decodable_prefix(vecs, 3, 3, poly)

    gf_mismatch = 0
    for k in (1, 2, 3, 4):
        fld = field(FieldSpec(k))
        pk = poly_bits(PRIMITIVE_POLYS[k])
        for a in range(1 << k):
            for b in range(1 << k):
                gf_mismatch += fld.mul(a, b) != poly_mulmod(a, b, k, pk)
                gf_mismatch += fld.add(a, b) != a ^ b
            if a:
                gf_mismatch += fld.inv(a) != brute_inverse(a, k, pk)

    ok = cut_mismatch == dec_mismatch == gf_mismatch == 0
    report(10, "oracle equivalence suites", ok,
           f"min-cut {cut_mismatch}/200 graphs, decodable prefix {dec_mismatch}/500 sets, "
           f"GF(2^k<=4) {gf_mismatch} mismatches")
    assert ok


def test_cli_determinism(report, tmp_path):
    flags = ["run", "--nodes", "25", "--receivers", "5", "--layers", "2", "--field", "2^8",
             "--trials", "50", "--seed", str(SEED), "--scheme", "all", "--criterion", "all"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = (main(flags + ["--out", str(a)]), main(flags + ["--out", str(b)]))
    ok = codes == (0, 0) and a.read_bytes() == b.read_bytes()
    report(11, "run twice gives byte-identical CSV", ok, f"exit codes {codes}, {len(a.read_bytes())} bytes")
    assert ok
