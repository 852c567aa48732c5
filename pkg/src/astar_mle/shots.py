"""Monte-Carlo shot sampling and the '01' text formats for syndromes and predictions.

Sampling uses numpy's Philox4x64 counter-based generator, so a given
``(model, count, seed)`` produces the same shots on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .dem import DetectorErrorModel

if TYPE_CHECKING:
    from .search import DecodeResult

__all__ = [
    "Shot",
    "ShotFormatError",
    "sample_shots",
    "read_shots",
    "write_shots",
    "write_predictions",
    "read_predictions",
]


class ShotFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Shot:
    syndrome: tuple[int, ...]
    true_observables: tuple[int, ...] = ()
    injected_errors: tuple[int, ...] | None = None

    @property
    def fired(self) -> list[int]:
        return [i for i, b in enumerate(self.syndrome) if b]


def syndrome_of(model: DetectorErrorModel, errors: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """XOR the detector and observable vectors of ``errors``."""
    dets = [0] * model.num_detectors
    obs = [0] * model.num_observables
    for ei in errors:
        err = model.errors[ei]
        for d in err.detectors:
            dets[d] ^= 1
        for o in err.observables:
            obs[o] ^= 1
    return tuple(dets), tuple(obs)


def sample_shots(model: DetectorErrorModel, count: int, seed: int) -> list[Shot]:
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.Generator(np.random.Philox(seed))
    probs = np.array([e.probability for e in model.errors], dtype=np.float64)
    draws = rng.random((count, len(probs))) < probs
    shots = []
    for row in draws:
        injected = tuple(int(i) for i in np.flatnonzero(row))
        dets, obs = syndrome_of(model, injected)
        shots.append(Shot(dets, obs, injected))
    return shots


def _read_bits(text: str, width: int | None) -> list[tuple[int, ...]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\r")
        bad = next((i for i, c in enumerate(line) if c not in "01"), None)
        if bad is not None:
            raise ShotFormatError(f"unexpected character {line[bad]!r} at column {bad + 1}", lineno)
        if width is not None and len(line) != width:
            raise ShotFormatError(f"expected {width} bits, got {len(line)}", lineno)
        rows.append(tuple(1 if c == "1" else 0 for c in line))
    return rows


def read_shots(text: str, num_detectors: int) -> list[Shot]:
    return [Shot(bits) for bits in _read_bits(text, num_detectors)]


def write_shots(shots: Iterable[Shot]) -> str:
    return "".join("".join("1" if b else "0" for b in s.syndrome) + "\n" for s in shots)


def write_predictions(results: Sequence["DecodeResult"]) -> str:
    return "".join("".join(map(str, r.predicted_observables)) + "\n" for r in results)


def read_predictions(text: str, num_observables: int | None = None) -> list[tuple[int, ...]]:
    return _read_bits(text, num_observables)
