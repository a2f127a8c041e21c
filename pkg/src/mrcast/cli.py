"""Command line: ``mrcast gen | run | sweep``.

Exit codes: 0 success, 1 usage error, 2 network generation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .gf import FieldSpec
from .harness import (
    AXES,
    SCHEMES,
    TrialConfig,
    Variant,
    rows_to_csv,
    run_config,
    run_sweep,
)
from .netgraph import GenerationError, GenParams, GraphError, generate_random, load_network
from .pushback import Criterion, Schedule

EXIT_USAGE = 1
EXIT_GENERATION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _choices(text: str, allowed, what: str) -> list[str]:
    items = [s.strip().lower() for s in text.split(",") if s.strip()]
    if items == ["all"]:
        return list(allowed)
    for s in items:
        if s not in allowed:
            raise UsageError(f"unknown {what} {s!r}; choose from {', '.join(allowed)} or 'all'")
    if not items:
        raise UsageError(f"empty {what} list")
    return items


def _variants(args) -> list[Variant]:
    schemes = _choices(args.scheme, SCHEMES, "scheme")
    criteria = _choices(args.criterion, [c.value for c in Criterion], "criterion")
    schedules = _choices(args.schedule, [s.value for s in Schedule], "schedule")
    out = []
    for scheme in schemes:
        if scheme == "pushback":
            out.extend(
                Variant(scheme, Criterion(c), Schedule(s)) for c in criteria for s in schedules
            )
        else:
            out.append(Variant(scheme))
    return out


def _add_gen_args(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--nodes", type=int, required=required)
    p.add_argument("--receivers", type=int, required=required)
    p.add_argument("--layers", type=int, required=required)
    p.add_argument("--max-in-degree", type=int, default=None, help="defaults to --layers")
    p.add_argument("--max-min-cut", type=int, default=None, help="defaults to --layers")
    p.add_argument("--seed", type=int, default=0)


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--net", help="network file; overrides --nodes/--receivers/--layers")
    _add_gen_args(p, required=False)
    p.add_argument("--scheme", default="pushback", help=f"{'|'.join(SCHEMES)}, comma list or 'all'")
    p.add_argument("--criterion", default="mincut", help="minreq|mincut, comma list or 'all'")
    p.add_argument("--schedule", default="sequential", help="sequential|flooding, comma list or 'all'")
    p.add_argument("--field", default="inf", help="2^k (k=1..16) or inf")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--out", help="CSV output path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mrcast", description="Pushback network coding for multi-resolution multicast.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="write a random network file")
    _add_gen_args(gen, required=True)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run trials for one configuration")
    _add_run_args(run)

    sweep = sub.add_parser("sweep", help="run trials across a parameter axis")
    _add_run_args(sweep)
    sweep.add_argument("--axis", required=True, choices=AXES)
    sweep.add_argument("--values", required=True, help="comma-separated axis values")
    sweep.set_defaults(scheme="all", criterion="all")
    return parser


def _gen_params(args) -> GenParams:
    missing = [f"--{k}" for k in ("nodes", "receivers", "layers") if getattr(args, k) is None]
    if missing:
        raise UsageError(f"missing {', '.join(missing)} (or pass --net)")
    return GenParams(
        node_count=args.nodes,
        receiver_count=args.receivers,
        layers=args.layers,
        max_in_degree=args.max_in_degree,
        max_min_cut=args.max_min_cut,
        seed=args.seed,
    )


def _config(args) -> TrialConfig:
    try:
        f = FieldSpec.parse(args.field)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    network = None
    if args.net:
        try:
            network = load_network(args.net)
        except (OSError, GraphError) as exc:
            raise UsageError(f"cannot load {args.net}: {exc}") from None
        gen = GenParams(network.node_count, len(network.receivers), network.layers, seed=args.seed)
    else:
        gen = _gen_params(args)
    return TrialConfig(gen=gen, field=f, trials=args.trials, base_seed=args.seed, network=network)


def _sweep_values(args) -> list:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values is empty")
    if args.axis == "field":
        try:
            for v in values:
                FieldSpec(int(v)) if v.isdigit() else FieldSpec.parse(v)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return values
    try:
        return [int(v) for v in values]
    except ValueError:
        raise UsageError(f"--values for axis {args.axis} must be integers") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            g = generate_random(_gen_params(args))
            Path(args.out).write_text(g.to_text())
            return 0
        cfg = _config(args)
        variants = _variants(args)
        if args.command == "run":
            rows = run_config(cfg, variants)
        else:
            if cfg.network is not None and args.axis != "field":
                raise UsageError("a fixed --net can only be swept along the field axis")
            rows = run_sweep(cfg, args.axis, _sweep_values(args), variants)
        _emit(rows_to_csv(rows), args.out)
        return 0
    except UsageError as exc:
        print(f"mrcast: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GenerationError as exc:
        print(f"mrcast: generation failed: {exc}", file=sys.stderr)
        return EXIT_GENERATION


if __name__ == "__main__":
    sys.exit(main())
