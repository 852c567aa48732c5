import json
import subprocess
import sys

import pytest

from astar_mle.cli import main
from astar_mle.dem import parse_dem, serialize_dem
from astar_mle.synthetic import chain_model, grid_model


@pytest.fixture
def dem(tmp_path):
    def write(model, name="m.dem"):
        path = tmp_path / name
        path.write_text(serialize_dem(model) if not isinstance(model, str) else model)
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestDecode:
    def test_empty_shots(self, capsys, dem, tmp_path):
        shots = tmp_path / "s.01"
        shots.write_text("")
        code, out, err = run(capsys, "decode", "--model", dem(chain_model(3, 0.1)), "--shots", str(shots))
        assert code == 0 and out == ""
        assert "shots=0" in err

    def test_three_shots(self, capsys, dem, tmp_path):
        shots = tmp_path / "s.01"
        shots.write_text("100\n011\n000\n")
        code, out, _ = run(capsys, "decode", "--model", dem(chain_model(3, 0.1)), "--shots", str(shots))
        assert code == 0
        assert out.splitlines() == ["1", "0", "0"]

    def test_queue_limit_gives_zeros(self, capsys, dem, tmp_path):
        shots = tmp_path / "s.01"
        shots.write_text("101010101\n000000000\n")
        code, out, err = run(capsys, "decode", "--model", dem(grid_model(3, 3, 0.1)), "--shots", str(shots),
                             "--pq-limit", "1")
        assert code == 0
        assert out.splitlines() == ["0", "0"]
        assert "warning: shot 0: queue_limit_reached" in err
        assert "warnings=1" in err

    def test_out_file_and_flags(self, capsys, dem, tmp_path):
        out_path = tmp_path / "pred.txt"
        code, out, _ = run(capsys, "decode", "--model", dem(grid_model(3, 3, 0.05)), "--sample", "25", "--seed", "3",
                           "--beam", "inf", "--no-revisit=false", "--at-most-two", "--level", "L0",
                           "--out", str(out_path))
        assert code == 0 and out == ""
        assert len(out_path.read_text().splitlines()) == 25

    def test_levels_agree(self, capsys, dem):
        path = dem(grid_model(4, 4, 0.05))
        outs = {run(capsys, "decode", "--model", path, "--sample", "50", "--level", lv)[1] for lv in
                ("L0", "L1", "L2", "L3", "L4")}
        assert len(outs) == 1

    def test_parse_error(self, capsys, dem):
        path = dem("error(0.1) D0\nerror(x) D1\n")
        code, _, err = run(capsys, "decode", "--model", path, "--sample", "1")
        assert code == 2
        assert path in err and "line 2" in err

    def test_bad_shots_file(self, capsys, dem, tmp_path):
        shots = tmp_path / "s.01"
        shots.write_text("10\n1\n")
        code, _, err = run(capsys, "decode", "--model", dem(chain_model(2, 0.1)), "--shots", str(shots))
        assert code == 2 and "line 2" in err

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "decode", "--model", "/nonexistent.dem", "--sample", "1")
        assert code == 2

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["decode"],
            ["decode", "--model", "x.dem"],
            ["decode", "--model", "x.dem", "--sample", "1", "--level", "L9"],
            ["decode", "--model", "x.dem", "--sample", "1", "--beam", "-1"],
            ["bench", "--model", "x.dem", "--levels", "L0,Q"],
            ["synth", "chain", "3", "--p", "0.7"],
            ["synth", "grid", "3"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 1
        assert err


class TestSample:
    def test_zero(self, capsys, dem):
        code, out, _ = run(capsys, "sample", "--model", dem(chain_model(4, 0.1)), "--count", "0")
        assert code == 0 and out == ""

    def test_reproducible(self, capsys, dem, tmp_path):
        path = dem(grid_model(4, 4, 0.1))
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(capsys, "sample", "--model", path, "--count", "30", "--seed", "5", "--out", str(a))[0] == 0
        assert run(capsys, "sample", "--model", path, "--sample", "30", "--seed", "5", "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().splitlines()
        assert len(lines) == 30 and all(len(line) == 16 for line in lines)

    def test_negative(self, capsys, dem):
        assert run(capsys, "sample", "--model", dem(chain_model(4, 0.1)), "--count", "-1")[0] == 1


class TestVerify:
    def test_exact_passes(self, capsys, dem):
        code, out, _ = run(capsys, "verify", "--model", dem(grid_model(3, 3, 0.1)), "--sample", "40",
                           "--beam", "inf", "--no-revisit=false")
        assert code == 0
        assert "mismatches=0" in out

    def test_beam_zero_report(self, capsys, dem):
        code, out, _ = run(capsys, "verify", "--model", dem(grid_model(3, 3, 0.2)), "--sample", "40", "--beam", "0")
        assert code == 0
        gaps = [float(line.split("\t")[3]) for line in out.splitlines()[1:-1]]
        assert all(g >= -1e-9 for g in gaps if g == g)

    def test_oversized(self, capsys, dem):
        code, _, err = run(capsys, "verify", "--model", dem(grid_model(5, 5, 0.1)), "--sample", "1")
        assert code == 1
        assert "limited to 25" in err


class TestBench:
    def test_table_and_json(self, capsys, dem, tmp_path):
        rows = tmp_path / "rows.jsonl"
        code, out, _ = run(capsys, "bench", "--model", dem(grid_model(3, 3, 0.05)), "--sample", "20",
                           "--levels", "L0,L4", "--repeats", "1", "--json", str(rows))
        assert code == 0
        assert "L0" in out and "L4" in out
        recs = [json.loads(line) for line in rows.read_text().splitlines()]
        assert [r["level"] for r in recs] == ["L0", "L4"]
        assert recs[0]["speedup"] == 1.0


class TestSynth:
    def test_chain(self, capsys):
        code, out, _ = run(capsys, "synth", "chain", "1", "--p", "0.1")
        assert code == 0
        m = parse_dem(out)
        assert m.num_detectors == 1 and m.num_errors == 2

    def test_grid(self, capsys):
        code, out, _ = run(capsys, "synth", "grid", "2", "2")
        assert code == 0
        assert parse_dem(out) == grid_model(2, 2, 0.01)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "astar_mle", "synth", "chain", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert parse_dem(proc.stdout).num_errors == 4
