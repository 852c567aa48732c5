import pytest

from astar_mle.dem import parse_dem, serialize_dem
from astar_mle.synthetic import chain_model, grid_model, make_synthetic_model


def test_chain_of_one():
    m = chain_model(1, 0.1)
    assert m.num_detectors == 1
    assert m.num_errors == 2
    assert [e.detectors for e in m.errors] == [(0,), (0,)]


@pytest.mark.parametrize("n", [2, 5, 200])
def test_chain_shape(n):
    m = chain_model(n, 0.01)
    assert m.num_detectors == n
    assert m.num_errors == n + 1
    assert [e.index for e in m.errors if e.observables] == [0]
    # each detector touched exactly twice
    counts = [0] * n
    for e in m.errors:
        for d in e.detectors:
            counts[d] += 1
    assert counts == [2] * n


@pytest.mark.parametrize("w, h", [(1, 1), (2, 2), (3, 5), (12, 12)])
def test_grid_shape(w, h):
    m = grid_model(w, h, 0.01)
    assert m.num_detectors == w * h
    assert m.num_errors == h * (w + 1) + w * (h - 1)
    assert all(1 <= len(e.detectors) <= 2 for e in m.errors)


def test_grid_round_trip():
    m = grid_model(2, 2, 0.05)
    assert parse_dem(serialize_dem(m)) == m


def test_factory():
    assert make_synthetic_model("chain", 4, p=0.1) == chain_model(4, 0.1)
    assert make_synthetic_model("grid", 3, 2, p=0.1) == grid_model(3, 2, 0.1)


@pytest.mark.parametrize(
    "call",
    [
        lambda: chain_model(0, 0.1),
        lambda: grid_model(0, 3, 0.1),
        lambda: chain_model(3, 0.5),
        lambda: make_synthetic_model("chain", 2, 2, p=0.1),
        lambda: make_synthetic_model("torus", 2, p=0.1),
    ],
)
def test_invalid(call):
    with pytest.raises(ValueError):
        call()
