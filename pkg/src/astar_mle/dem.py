"""Detector error models: parsing, serialization and decoder-side indices."""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

__all__ = [
    "DemParseError",
    "DemRangeError",
    "UnsupportedProbabilityError",
    "ErrorMechanism",
    "DetectorErrorModel",
    "ErrorCost",
    "DecoderContext",
    "likelihood_cost",
    "parse_dem",
    "serialize_dem",
    "build_context",
]


class DemParseError(ValueError):
    """Malformed detector error model text.

    ``line`` and ``column`` are 1-based.
    """

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DemRangeError(DemParseError):
    """A probability or target index outside its admissible range."""


class UnsupportedProbabilityError(DemRangeError):
    """Probability in [0.5, 1): would give a non-positive likelihood cost."""


def likelihood_cost(p: float) -> float:
    """Return ``ln((1 - p) / p)``, the cost of including an error of probability ``p``."""
    if not 0.0 < p < 0.5:
        raise ValueError(f"likelihood cost needs 0 < p < 0.5, got {p!r}")
    return math.log((1.0 - p) / p)


@dataclass(frozen=True)
class ErrorMechanism:
    index: int
    probability: float
    detectors: tuple[int, ...]
    observables: frozenset[int] = frozenset()
    likelihood_cost: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.detectors:
            raise ValueError(f"error {self.index} fires no detectors")
        if any(a >= b for a, b in zip(self.detectors, self.detectors[1:])):
            raise ValueError(f"error {self.index}: detectors must be strictly increasing")
        object.__setattr__(self, "likelihood_cost", likelihood_cost(self.probability))

    @property
    def observable_mask(self) -> int:
        mask = 0
        for o in self.observables:
            mask |= 1 << o
        return mask


@dataclass(frozen=True)
class DetectorErrorModel:
    errors: tuple[ErrorMechanism, ...] = ()
    num_detectors: int = 0
    num_observables: int = 0

    def __post_init__(self) -> None:
        for i, err in enumerate(self.errors):
            if err.index != i:
                raise ValueError(f"error at position {i} has index {err.index}")
            if err.detectors[-1] >= self.num_detectors:
                raise ValueError(f"error {i} references detector {err.detectors[-1]}")
            if err.observables and max(err.observables) >= self.num_observables:
                raise ValueError(f"error {i} references observable {max(err.observables)}")

    @property
    def num_errors(self) -> int:
        return len(self.errors)

    @classmethod
    def from_mechanisms(
        cls,
        mechanisms: Iterable[tuple[float, Iterable[int], Iterable[int]]],
        num_detectors: int | None = None,
        num_observables: int | None = None,
    ) -> "DetectorErrorModel":
        """Build a model from ``(p, detectors, observables)`` triples.

        Detector and observable counts default to one past the largest index used.
        """
        errors = []
        max_det = max_obs = -1
        for i, (p, dets, obs) in enumerate(mechanisms):
            dets = tuple(sorted(_xor_reduce(dets)))
            obs = frozenset(_xor_reduce(obs))
            errors.append(ErrorMechanism(i, float(p), dets, obs))
            max_det = max(max_det, dets[-1])
            if obs:
                max_obs = max(max_obs, max(obs))
        return cls(
            tuple(errors),
            max_det + 1 if num_detectors is None else num_detectors,
            max_obs + 1 if num_observables is None else num_observables,
        )


def _xor_reduce(indices: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for i in indices:
        out ^= {i}
    return out


_ERROR_RE = re.compile(r"error\s*\(\s*([^)]*?)\s*\)")
_TARGET_RE = re.compile(r"([DL])(\d+)$")
_DECLARATIONS = {"detector", "logical_observable"}
_IGNORED = {"shift_detectors"}
# Keep index sizes sane; a typo like D99999999999 should not allocate a huge model.
_MAX_INDEX = 1 << 31


def parse_dem(text: str) -> DetectorErrorModel:
    """Parse the ``error(p) D.. L..`` subset of the detector error model format.

    ``#`` starts a comment. ``detector`` and ``logical_observable`` lines
    only extend the detector and observable counts; ``shift_detectors`` is
    skipped, and other keywords are skipped with a warning. Repeated targets inside one instruction cancel in pairs, and
    zero-probability instructions are dropped.
    """
    mechanisms: list[tuple[float, set[int], set[int]]] = []
    max_det = max_obs = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        offset = len(line) - len(line.lstrip())
        m = _ERROR_RE.match(stripped)
        if m is None:
            keyword = re.match(r"[A-Za-z_]+", stripped)
            if keyword is None:
                raise DemParseError(f"expected an instruction, got {stripped!r}", lineno, offset + 1)
            word = keyword.group(0)
            if word in _DECLARATIONS:
                # declared indices count even when no error touches them
                for tm in re.finditer(r"\b([DL])(\d+)\b", stripped[keyword.end():]):
                    idx = int(tm.group(2))
                    if idx >= _MAX_INDEX:
                        raise DemRangeError(f"target index {idx} too large", lineno,
                                            offset + keyword.end() + tm.start() + 1)
                    if tm.group(1) == "D":
                        max_det = max(max_det, idx)
                    else:
                        max_obs = max(max_obs, idx)
            elif word not in _IGNORED:
                if word == "error":
                    raise DemParseError("malformed error instruction", lineno, offset + 1)
                warnings.warn(f"line {lineno}: ignoring unknown instruction {word!r}")
            continue

        prob_col = offset + m.start(1) + 1
        try:
            p = float(m.group(1))
        except ValueError:
            raise DemParseError(f"bad probability {m.group(1)!r}", lineno, prob_col) from None
        if not 0.0 <= p < 1.0 or math.isnan(p):
            raise DemRangeError(f"probability {p!r} outside [0, 1)", lineno, prob_col)
        if p >= 0.5:
            raise UnsupportedProbabilityError(
                f"probability {p!r} >= 0.5 is not supported", lineno, prob_col
            )

        dets: set[int] = set()
        obs: set[int] = set()
        rest = stripped[m.end():]
        if rest and not rest[0].isspace():
            raise DemParseError("expected whitespace after error(...)", lineno, offset + m.end() + 1)
        for tm in re.finditer(r"\S+", rest):
            col = offset + m.end() + tm.start() + 1
            tok = _TARGET_RE.match(tm.group(0))
            if tok is None:
                raise DemParseError(f"bad target {tm.group(0)!r}", lineno, col)
            idx = int(tok.group(2))
            if idx >= _MAX_INDEX:
                raise DemRangeError(f"target index {idx} too large", lineno, col)
            (dets if tok.group(1) == "D" else obs).symmetric_difference_update({idx})
        if p == 0.0:
            continue
        if not dets:
            raise DemParseError("error instruction fires no detectors", lineno, offset + 1)
        max_det = max(max_det, max(dets))
        if obs:
            max_obs = max(max_obs, max(obs))
        mechanisms.append((p, dets, obs))

    errors = tuple(
        ErrorMechanism(i, p, tuple(sorted(d)), frozenset(o))
        for i, (p, d, o) in enumerate(mechanisms)
    )
    return DetectorErrorModel(errors, max_det + 1, max_obs + 1)


def serialize_dem(model: DetectorErrorModel) -> str:
    lines = []
    for err in model.errors:
        targets = [f"D{d}" for d in err.detectors] + [f"L{o}" for o in sorted(err.observables)]
        # repr() is the shortest string that round-trips a float exactly.
        lines.append(f"error({err.probability!r}) " + " ".join(targets))
    used_det = max((e.detectors[-1] for e in model.errors), default=-1)
    used_obs = max((max(e.observables) for e in model.errors if e.observables), default=-1)
    if model.num_detectors - 1 > used_det:
        lines.append(f"detector D{model.num_detectors - 1}")
    if model.num_observables - 1 > used_obs:
        lines.append(f"logical_observable L{model.num_observables - 1}")
    return "".join(line + "\n" for line in lines)


class ErrorCost(NamedTuple):
    likelihood_cost: float
    min_cost: float


@dataclass(frozen=True, eq=False)
class DecoderContext:
    """A model together with the read-only indices the search consumes.

    ``d2e[d]`` lists the errors touching detector ``d`` ordered by
    ``(min_cost, index)``; ``error_costs[e].min_cost`` is the cost of ``e``
    split evenly over all of its detectors, a lower bound on any per-detector
    share it can contribute.
    """

    model: DetectorErrorModel
    d2e: tuple[tuple[int, ...], ...]
    error_costs: tuple[ErrorCost, ...]
    # Flat views used by the hot loops.
    error_detectors: tuple[tuple[int, ...], ...]
    error_lc: tuple[float, ...]
    error_det_masks: tuple[int, ...]
    error_obs_masks: tuple[int, ...]
    d2e_costs: tuple[tuple[tuple[int, float, float], ...], ...]

    @property
    def num_detectors(self) -> int:
        return self.model.num_detectors

    @property
    def num_observables(self) -> int:
        return self.model.num_observables

    @property
    def num_errors(self) -> int:
        return self.model.num_errors


def build_context(model: DetectorErrorModel) -> DecoderContext:
    errors = model.errors
    costs = tuple(ErrorCost(e.likelihood_cost, e.likelihood_cost / len(e.detectors)) for e in errors)
    buckets: list[list[int]] = [[] for _ in range(model.num_detectors)]
    for e in errors:
        for d in e.detectors:
            buckets[d].append(e.index)
    d2e = tuple(tuple(sorted(b, key=lambda ei: (costs[ei].min_cost, ei))) for b in buckets)
    det_masks = []
    for e in errors:
        mask = 0
        for d in e.detectors:
            mask |= 1 << d
        det_masks.append(mask)
    return DecoderContext(
        model=model,
        d2e=d2e,
        error_costs=costs,
        error_detectors=tuple(e.detectors for e in errors),
        error_lc=tuple(c.likelihood_cost for c in costs),
        error_det_masks=tuple(det_masks),
        error_obs_masks=tuple(e.observable_mask for e in errors),
        d2e_costs=tuple(
            tuple((ei, costs[ei].likelihood_cost, costs[ei].min_cost) for ei in row) for row in d2e
        ),
    )
