"""Monte-Carlo experiments: trials, the two aggregate metrics, sweeps, CSV.

Trial ``t`` of a configuration derives all of its randomness from
``base_seed + t`` pushed through SplitMix64, with separate streams for
network generation and for coding coefficients.  Every scheme in a sweep
cell therefore sees the same networks, and any row can be replayed on its
own.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .baselines import route_intra_layer, route_pt2pt, route_steiner
from .codeassign import assign_codes
from .gf import FieldSpec
from .netgraph import GenParams, LayeredDag, all_min_cuts, generate_random
from .pushback import Criterion, Schedule, run_pushback

SCHEMES = ("pushback", "pt2pt", "steiner", "intralayer")
AXES = ("field", "receivers", "nodes")
CSV_HEADER = (
    "axis", "value", "scheme", "criterion", "schedule", "field",
    "trials", "pct_happy", "pct_rate", "base_seed",
)

_MASK64 = (1 << 64) - 1
GRAPH_STREAM = 0x6A09E667F3BCC908
CODE_STREAM = 0xBB67AE8584CAA73B


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_seed(base_seed: int, t: int) -> int:
    return splitmix64((base_seed + t) & _MASK64)


def stream_rng(seed: int, stream: int) -> random.Random:
    return random.Random(splitmix64(seed ^ stream))


@dataclass(frozen=True)
class Variant:
    """One scheme, plus criterion and schedule for pushback."""

    scheme: str
    criterion: Criterion | None = None
    schedule: Schedule | None = None

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "pushback":
            object.__setattr__(self, "criterion", Criterion(self.criterion or Criterion.MIN_CUT))
            object.__setattr__(self, "schedule", Schedule(self.schedule or Schedule.SEQUENTIAL))
        else:
            object.__setattr__(self, "criterion", None)
            object.__setattr__(self, "schedule", None)

    @property
    def label(self) -> str:
        if self.scheme != "pushback":
            return self.scheme
        return f"pb-{self.criterion.value}-{self.schedule.value}"


PB_MINCUT = Variant("pushback", Criterion.MIN_CUT)
PB_MINREQ = Variant("pushback", Criterion.MIN_REQ)
DEFAULT_VARIANTS = (PB_MINCUT, PB_MINREQ, Variant("pt2pt"), Variant("steiner"), Variant("intralayer"))


@dataclass(frozen=True)
class TrialConfig:
    gen: GenParams
    variant: Variant = PB_MINCUT
    field: FieldSpec = FieldSpec(None)
    trials: int = 1
    base_seed: int = 0
    network: LayeredDag | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass(frozen=True)
class TrialResult:
    min_cuts: tuple[int, ...]
    achieved: tuple[int, ...]
    layers: int
    variant: Variant = PB_MINCUT
    field: FieldSpec = FieldSpec(None)
    seed: int = 0

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.min_cuts, self.achieved))

    def demand(self) -> list[int]:
        return [min(c, self.layers) for c in self.min_cuts]


def trial_network(cfg: TrialConfig, t: int) -> LayeredDag:
    if cfg.network is not None:
        return cfg.network
    seed = trial_seed(cfg.base_seed, t)
    return generate_random(cfg.gen, stream_rng(seed, GRAPH_STREAM))


def simulate(
    g: LayeredDag,
    variant: Variant,
    f: FieldSpec,
    rng: random.Random,
    min_cuts: Sequence[int] | None = None,
) -> list[int]:
    """Layers achieved by every receiver (in ``g.receivers`` order)."""
    if variant.scheme == "pushback":
        req = run_pushback(g, variant.criterion, variant.schedule, min_cuts=min_cuts)
        _, dec = assign_codes(g, req, f, rng)
        return [dec.m_star[r] for r in g.receivers]
    if variant.scheme == "pt2pt":
        return route_pt2pt(g).achieved_list(g)
    if variant.scheme == "steiner":
        return route_steiner(g).achieved_list(g)
    return route_intra_layer(g).achieved_list(g)


def run_trial(cfg: TrialConfig, t: int) -> TrialResult:
    """Run trial ``t`` of ``cfg``; the result depends only on ``(cfg, t)``."""
    return _run_variants(cfg, t, (cfg.variant,))[0]


def _run_variants(cfg: TrialConfig, t: int, variants: Sequence[Variant]) -> list[TrialResult]:
    seed = trial_seed(cfg.base_seed, t)
    g = trial_network(cfg, t)
    cuts = all_min_cuts(g)
    rcuts = tuple(cuts[r] for r in g.receivers)
    out = []
    for v in variants:
        achieved = simulate(g, v, cfg.field, stream_rng(seed, CODE_STREAM), cuts)
        out.append(TrialResult(rcuts, tuple(achieved), g.layers, v, cfg.field, seed))
    return out


def _happy_fraction(r: TrialResult) -> Fraction:
    demand = r.demand()
    if not demand:
        raise ValueError("trial has no receivers")
    happy = sum(1 for a, d in zip(r.achieved, demand) if a == d)
    return Fraction(happy, len(demand))


def pct_happy_exact(results: Iterable[TrialResult]) -> Fraction:
    results = list(results)
    if not results:
        raise ValueError("pct_happy needs at least one trial")
    return 100 * sum((_happy_fraction(r) for r in results), Fraction(0)) / len(results)


def pct_rate_exact(results: Iterable[TrialResult]) -> Fraction:
    results = list(results)
    if not results:
        raise ValueError("pct_rate needs at least one trial")
    got = sum(sum(r.achieved) for r in results)
    want = sum(sum(r.demand()) for r in results)
    if want == 0:
        raise ValueError("total min-cut is zero")
    return Fraction(100 * got, want)


def pct_happy(results: Iterable[TrialResult]) -> float:
    """Mean over trials of the percentage of receivers that got their min-cut."""
    return float(pct_happy_exact(results))


def pct_rate(results: Iterable[TrialResult]) -> float:
    """Total layers delivered over total min-cut, as a percentage."""
    return float(pct_rate_exact(results))


def result_from_pairs(min_cuts: Sequence[int], achieved: Sequence[int], layers: int | None = None) -> TrialResult:
    """Build a :class:`TrialResult` from (min-cut, achieved) lists, e.g. for fixtures."""
    if layers is None:
        layers = max(min_cuts, default=1)
    return TrialResult(tuple(min_cuts), tuple(achieved), layers)


@dataclass(frozen=True)
class AggregateMetrics:
    pct_happy: float
    pct_rate: float
    trials: int

    @classmethod
    def of(cls, results: Sequence[TrialResult]) -> AggregateMetrics:
        return cls(pct_happy(results), pct_rate(results), len(results))


def run_cell(cfg: TrialConfig, variants: Sequence[Variant]) -> dict[Variant, AggregateMetrics]:
    """All trials of ``cfg`` for each variant, on shared networks."""
    per: dict[Variant, list[TrialResult]] = {v: [] for v in variants}
    for t in range(cfg.trials):
        for res in _run_variants(cfg, t, variants):
            per[res.variant].append(res)
    return {v: AggregateMetrics.of(rs) for v, rs in per.items()}


def apply_axis(cfg: TrialConfig, axis: str, value) -> TrialConfig:
    if axis == "field":
        f = value if isinstance(value, FieldSpec) else _field_from_axis(value)
        return replace(cfg, field=f)
    if axis == "receivers":
        return replace(cfg, gen=replace(cfg.gen, receiver_count=int(value)))
    if axis == "nodes":
        return replace(cfg, gen=replace(cfg.gen, node_count=int(value)))
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def _field_from_axis(value) -> FieldSpec:
    # Bare integers on the field axis are extension degrees (bits).
    if isinstance(value, int):
        return FieldSpec(value)
    s = str(value).strip()
    return FieldSpec(int(s)) if s.isdigit() else FieldSpec.parse(s)


def csv_row(axis: str, value, variant: Variant, cfg: TrialConfig, m: AggregateMetrics) -> dict[str, str]:
    return {
        "axis": axis,
        "value": str(value),
        "scheme": variant.scheme,
        "criterion": variant.criterion.value if variant.criterion else "-",
        "schedule": variant.schedule.value if variant.schedule else "-",
        "field": str(cfg.field),
        "trials": str(m.trials),
        "pct_happy": f"{m.pct_happy:.2f}",
        "pct_rate": f"{m.pct_rate:.2f}",
        "base_seed": str(cfg.base_seed),
    }


def run_sweep(
    base: TrialConfig,
    axis: str,
    values: Iterable,
    variants: Sequence[Variant] = DEFAULT_VARIANTS,
) -> list[dict[str, str]]:
    """One CSV row per (axis value, variant); variants share every network."""
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")
    rows = []
    for value in values:
        cfg = apply_axis(base, axis, value)
        metrics = run_cell(cfg, variants)
        rows.extend(csv_row(axis, value, v, cfg, metrics[v]) for v in variants)
    return rows


def run_config(cfg: TrialConfig, variants: Sequence[Variant]) -> list[dict[str, str]]:
    metrics = run_cell(cfg, variants)
    return [csv_row("none", "-", v, cfg, metrics[v]) for v in variants]


def rows_to_csv(rows: Iterable[dict[str, str]]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
