"""Command line front end.

Exit codes: 0 ok, 1 usage error, 2 input/parse error, 3 accuracy gate failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from .bench import LevelMismatchError, run_bench
from .dem import DemParseError, build_context, parse_dem, serialize_dem
from .oracle import OracleSizeError, cross_check
from .search import DecoderConfig, OptLevel, SearchStats, Status, make_engine
from .shots import ShotFormatError, read_shots, sample_shots, write_predictions, write_shots
from .synthetic import make_synthetic_model

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_ACCURACY = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _beam(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "none"):
        return math.inf
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("beam must be >= 0")
    return value


def _levels(text: str) -> list[OptLevel]:
    try:
        return [OptLevel.parse(t) for t in text.split(",") if t.strip()]
    except (KeyError, ValueError):
        raise argparse.ArgumentTypeError(f"bad level list {text!r}; use e.g. L0,L2,L4") from None


def _level(text: str) -> OptLevel:
    try:
        return OptLevel.parse(text)
    except (KeyError, ValueError):
        raise argparse.ArgumentTypeError(f"bad level {text!r}; use L0..L4") from None


def _add_config_flags(p: argparse.ArgumentParser, level: bool = True) -> None:
    p.add_argument("--beam", type=_beam, default=15, help="beam cutoff, integer or 'inf' (default 15)")
    p.add_argument("--pq-limit", type=int, default=200_000, help="priority queue cap (default 200000)")
    p.add_argument("--det-penalty", type=float, default=0.0, help="cost added per fired detector")
    p.add_argument(
        "--no-revisit", type=_bool, nargs="?", const=True, default=True,
        help="skip already-expanded fired patterns (default on; --no-revisit=false to disable)",
    )
    p.add_argument(
        "--at-most-two", type=_bool, nargs="?", const=True, default=False,
        help="allow at most two applied errors per fired detector (default off)",
    )
    if level:
        p.add_argument("--level", type=_level, default=OptLevel.L4, help="optimization level L0..L4")


def _config(args, level: OptLevel | None = None) -> DecoderConfig:
    if args.pq_limit < 1:
        raise _UsageError("--pq-limit must be >= 1")
    if args.det_penalty < 0:
        raise _UsageError("--det-penalty must be >= 0")
    return DecoderConfig(
        beam_cutoff=args.beam,
        pq_limit=args.pq_limit,
        det_penalty=args.det_penalty,
        no_revisit=args.no_revisit,
        at_most_two_errors_per_detector=args.at_most_two,
        opt_level=level if level is not None else getattr(args, "level", OptLevel.L4),
    )


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_model(path: str):
    try:
        return parse_dem(_read(path))
    except DemParseError as exc:
        raise DemParseError(f"{path}: {exc.args[0]}", exc.line, exc.column) from None


def _load_shots(args, model):
    if args.shots is not None:
        try:
            return read_shots(_read(args.shots), model.num_detectors)
        except ShotFormatError as exc:
            raise ShotFormatError(f"{args.shots}: {exc.args[0]}", exc.line) from None
    if args.sample is None:
        raise _UsageError("one of --shots or --sample is required")
    return sample_shots(model, args.sample, args.seed)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_decode(args) -> int:
    if args.shots is None and args.sample is None:
        raise _UsageError("one of --shots or --sample is required")
    config = _config(args)
    model = _load_model(args.model)
    shots = _load_shots(args, model)
    ctx = build_context(model)
    engine = make_engine(ctx, config)
    results = []
    total = SearchStats()
    gave_up = 0
    for i, shot in enumerate(shots):
        res = engine.decode(shot.syndrome)
        total += res.stats
        if res.status is not Status.OPTIMAL:
            gave_up += 1
            print(f"warning: shot {i}: {res.status.value}", file=sys.stderr)
        results.append(res)
    _write(args.out, write_predictions(results))
    print(f"shots={len(results)} warnings={gave_up} " + " ".join(f"{k}={v}" for k, v in total.as_dict().items()),
          file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.count < 0:
        raise _UsageError("--count must be >= 0")
    model = _load_model(args.model)
    _write(args.out, write_shots(sample_shots(model, args.count, args.seed)))
    return EXIT_OK


def cmd_bench(args) -> int:
    if not args.levels:
        raise _UsageError("--levels must name at least one level")
    if args.repeats < 1:
        raise _UsageError("--repeats must be >= 1")
    config = _config(args, OptLevel.L4)
    model = _load_model(args.model)
    if args.shots is None and args.sample is None:
        args.sample = 1000
    shots = _load_shots(args, model)
    report = run_bench(
        build_context(model),
        shots,
        config,
        levels=args.levels,
        repeats=args.repeats,
        model_name=args.model,
        seed=args.seed if args.shots is None else None,
    )
    sys.stdout.write(report.format_table())
    if args.json:
        _write(args.json, report.to_jsonl())
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config(args)
    model = _load_model(args.model)
    if args.shots is None and args.sample is None:
        args.sample = 100
    shots = _load_shots(args, model)
    report = cross_check(build_context(model), config, shots)
    sys.stdout.write(report.format())
    return EXIT_ACCURACY if report.mismatches else EXIT_OK


def cmd_synth(args) -> int:
    if not 0 < args.p < 0.5:
        raise _UsageError("--p must be in (0, 0.5)")
    try:
        model = make_synthetic_model(args.kind, *args.size, p=args.p)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    _write(args.out, serialize_dem(model))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="astar-mle", description="A* most-likely-error decoder for detector error models")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shot_source(p, default_seed=0):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--shots", help="'01' syndrome file, one shot per line")
        src.add_argument("--sample", type=int, help="sample this many shots from the model instead")
        p.add_argument("--seed", type=int, default=default_seed, help="sampling seed")

    p = sub.add_parser("decode", help="decode shots, one prediction line per shot")
    p.add_argument("--model", required=True)
    shot_source(p)
    _add_config_flags(p)
    p.add_argument("--out", help="prediction file (default stdout)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sample", help="sample shots from a model as '01' lines")
    p.add_argument("--model", required=True)
    p.add_argument("--count", "--sample", dest="count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bench", help="time decoding at several optimization levels")
    p.add_argument("--model", required=True)
    shot_source(p)
    _add_config_flags(p, level=False)
    p.add_argument("--levels", type=_levels, default=list(OptLevel), help="comma separated, e.g. L0,L2,L4")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--json", help="write machine-readable rows (JSON lines) here; '-' for stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="cross-check the decoder against the exact oracle")
    p.add_argument("--model", required=True)
    shot_source(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="write a synthetic model as DEM text")
    p.add_argument("kind", choices=["chain", "grid"])
    p.add_argument("size", type=int, nargs="+")
    p.add_argument("--p", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DemParseError, ShotFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LevelMismatchError as exc:
        print(f"accuracy gate failed: {exc}", file=sys.stderr)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
