"""Per-level decode timing on a fixed shot stream.

Levels are timed in interleaved batches (L0 batch, L1 batch, ..., repeated),
and the minimum CPU time per level is reported. Every level must return the
same applied-error lists and costs as the first one, otherwise
:class:`LevelMismatchError` is raised and no report is produced.
"""

from __future__ import annotations

import datetime as _dt
import json
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

from .dem import DecoderContext
from .search import DecodeResult, DecoderConfig, OptLevel, SearchStats, make_engine
from .shots import Shot

__all__ = ["LevelMismatchError", "BenchRow", "BenchReport", "run_bench", "read_rows"]

MIN_TIMER_TICKS = 100


class LevelMismatchError(RuntimeError):
    pass


@dataclass
class BenchRow:
    level: str
    shots: int
    cpu_seconds: float
    speedup: float
    stats: dict[str, int]

    def to_json(self, meta: dict) -> str:
        return json.dumps({"record": "bench_row", **asdict(self), **meta}, sort_keys=True)


@dataclass
class BenchReport:
    rows: list[BenchRow]
    model: str
    config: dict
    seed: int | None
    repeats: int
    baseline: str
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())
    warnings: list[str] = field(default_factory=list)

    def row(self, level: OptLevel | str) -> BenchRow:
        name = OptLevel.parse(level).name
        return next(r for r in self.rows if r.level == name)

    def format_table(self) -> str:
        lines = [
            f"model: {self.model}  seed: {self.seed}  repeats: {self.repeats}  baseline: {self.baseline}",
            f"{'level':<6}{'shots':>8}{'cpu_s':>12}{'speedup':>10}{'expanded':>12}{'detcost':>12}{'early_exit':>12}",
        ]
        for r in self.rows:
            lines.append(
                f"{r.level:<6}{r.shots:>8}{r.cpu_seconds:>12.4f}{r.speedup:>10.3f}"
                f"{r.stats['nodes_expanded']:>12}{r.stats['detcost_calls']:>12}"
                f"{r.stats['detcost_early_exits']:>12}"
            )
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        meta = {
            "model": self.model,
            "seed": self.seed,
            "repeats": self.repeats,
            "baseline": self.baseline,
            "timestamp": self.timestamp,
            "config": self.config,
        }
        return "".join(r.to_json(meta) + "\n" for r in self.rows)


def read_rows(text: str) -> list[BenchRow]:
    """Parse the ``bench_row`` records written by :meth:`BenchReport.to_jsonl`."""
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec.get("record") != "bench_row":
            continue
        rows.append(BenchRow(rec["level"], rec["shots"], rec["cpu_seconds"], rec["speedup"], rec["stats"]))
    return rows


def _signature(results: Sequence[DecodeResult]) -> list[tuple]:
    return [(r.status, r.applied_errors, r.cost) for r in results]


def run_bench(
    ctx: DecoderContext,
    shots: Sequence[Shot],
    config: DecoderConfig,
    levels: Sequence[OptLevel | str | int] = tuple(OptLevel),
    repeats: int = 3,
    model_name: str = "<memory>",
    seed: int | None = None,
    clock: Callable[[], float] = time.process_time,
) -> BenchReport:
    """Time decoding of ``shots`` at each level; ``config.opt_level`` is ignored.

    Only the decode loop is timed. Speedups are relative to L0 when it is
    selected, else to the lowest selected level.
    """
    levels = sorted({OptLevel.parse(lv) for lv in levels})
    if not levels:
        raise ValueError("no levels selected")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    syndromes = [s.syndrome for s in shots]
    best: dict[OptLevel, float] = {}
    outputs: dict[OptLevel, list[DecodeResult]] = {}
    for _ in range(repeats):
        for lv in levels:
            cfg = replace(config, opt_level=lv)
            engine = make_engine(ctx, cfg)
            t0 = clock()
            results = [engine.decode(s) for s in syndromes]
            dt = clock() - t0
            best[lv] = min(dt, best.get(lv, float("inf")))
            outputs[lv] = results

    ref_level = levels[0]
    ref = _signature(outputs[ref_level])
    for lv in levels[1:]:
        got = _signature(outputs[lv])
        if got != ref:
            first = next(i for i, (a, b) in enumerate(zip(ref, got)) if a != b)
            raise LevelMismatchError(
                f"{lv.name} disagrees with {ref_level.name} on shot {first}: {got[first]} != {ref[first]}"
            )

    base = best[ref_level]
    rows = []
    for lv in levels:
        agg = SearchStats()
        for r in outputs[lv]:
            agg += r.stats
        t = best[lv]
        speedup = 1.0 if t == base else (base / t if t > 0 else float("inf"))
        rows.append(BenchRow(lv.name, len(syndromes), t, speedup, agg.as_dict()))

    report = BenchReport(
        rows=rows,
        model=model_name,
        config=config.as_dict(),
        seed=seed,
        repeats=repeats,
        baseline=ref_level.name,
    )
    try:
        resolution = time.get_clock_info("process_time").resolution
    except ValueError:
        resolution = 1e-9
    total = sum(best.values())
    if resolution > 0 and total / resolution < MIN_TIMER_TICKS:
        report.warnings.append(
            f"total measured time {total:.3g}s is under {MIN_TIMER_TICKS} timer ticks; speedups are unreliable"
        )
    return report
