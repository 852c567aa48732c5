import json

import pytest

from astar_mle import cli
from astar_mle.bench import BenchRow, LevelMismatchError, read_rows, run_bench
from astar_mle.dem import build_context, serialize_dem
from astar_mle.search import DecoderConfig, OptLevel, engines
from astar_mle.shots import sample_shots
from astar_mle.synthetic import grid_model


@pytest.fixture(scope="module")
def setup():
    model = grid_model(4, 4, 0.03)
    return build_context(model), sample_shots(model, 40, 6)


def test_single_level(setup):
    ctx, shots = setup
    report = run_bench(ctx, shots, DecoderConfig(), levels=["L0"], repeats=1)
    assert [r.level for r in report.rows] == ["L0"]
    assert report.rows[0].speedup == 1.0
    assert report.rows[0].shots == 40


def test_all_levels(setup):
    ctx, shots = setup
    report = run_bench(ctx, shots, DecoderConfig(), repeats=1, seed=6)
    assert [r.level for r in report.rows] == ["L0", "L1", "L2", "L3", "L4"]
    assert report.row("L0").speedup == 1.0
    assert report.baseline == "L0"
    expanded = {r.stats["nodes_expanded"] for r in report.rows}
    assert len(expanded) == 1
    assert report.row(OptLevel.L3).stats["detcost_early_exits"] > 0
    assert report.row("L2").stats["detcost_early_exits"] == 0
    table = report.format_table()
    assert table.count("\n") == 2 + 5 + len(report.warnings)


def test_baseline_without_l0(setup):
    ctx, shots = setup
    report = run_bench(ctx, shots, DecoderConfig(), levels=[4, "L2"], repeats=1)
    assert report.baseline == "L2"
    assert report.row("L2").speedup == 1.0


def test_fake_clock_speedup(setup):
    ctx, shots = setup
    ticks = iter([0, 4, 0, 1])
    report = run_bench(ctx, shots, DecoderConfig(), levels=["L0", "L4"], repeats=1, clock=lambda: next(ticks))
    assert report.row("L4").speedup == 4.0
    assert report.row("L4").cpu_seconds == 1


def test_invalid_arguments(setup):
    ctx, shots = setup
    with pytest.raises(ValueError):
        run_bench(ctx, shots, DecoderConfig(), levels=[])
    with pytest.raises(ValueError):
        run_bench(ctx, shots, DecoderConfig(), repeats=0)


def test_jsonl_round_trip(setup):
    ctx, shots = setup
    report = run_bench(ctx, shots, DecoderConfig(), levels=["L1", "L3"], repeats=1, model_name="g.dem", seed=6)
    text = report.to_jsonl()
    assert read_rows(text) == report.rows
    rec = json.loads(text.splitlines()[0])
    assert rec["record"] == "bench_row"
    for key in ("level", "shots", "cpu_seconds", "speedup", "stats", "model", "seed", "timestamp", "config"):
        assert key in rec
    assert read_rows('{"record": "other"}\n\n' + text) == report.rows


class _Broken(engines._L4Engine):
    def decode(self, syndrome):
        r = super().decode(syndrome)
        if any(syndrome):
            r.applied_errors = r.applied_errors[::-1] + (0,)
        return r


def test_fault_injection(setup, monkeypatch, tmp_path):
    ctx, shots = setup
    monkeypatch.setitem(engines.ENGINES, OptLevel.L4, _Broken)
    with pytest.raises(LevelMismatchError, match="L4"):
        run_bench(ctx, shots, DecoderConfig(), levels=["L0", "L4"], repeats=1)
    path = tmp_path / "m.dem"
    path.write_text(serialize_dem(ctx.model))
    code = cli.main(["bench", "--model", str(path), "--sample", "20", "--levels", "L0,L4", "--repeats", "1"])
    assert code == 3


def test_row_dataclass():
    row = BenchRow("L0", 1, 0.5, 1.0, {"nodes_expanded": 1})
    assert read_rows(row.to_json({}) + "\n") == [row]
