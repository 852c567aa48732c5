from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields


class OptLevel(enum.IntEnum):
    """Data-layout ladder for the search engine.

    L0  bit-packed fired/blocked flags, separate blocked and count arrays, full detcost scan
    L1  byte-wide flags
    L2  blocked flag and fired count fused into one record per error
    L3  L2 plus per-detector adjacency sorted by cost lower bound, early-exit detcost
    L4  L3 plus fired pattern held as a word-packed bitset with word-wise hashing
    """

    L0 = 0
    L1 = 1
    L2 = 2
    L3 = 3
    L4 = 4

    @classmethod
    def parse(cls, value: "OptLevel | int | str") -> "OptLevel":
        if isinstance(value, str):
            value = value.strip().upper()
            return cls[value] if value.startswith("L") else cls(int(value))
        return cls(value)


class Status(enum.Enum):
    OPTIMAL = "optimal"  # optimal modulo whichever pruning heuristics are enabled
    QUEUE_LIMIT = "queue_limit_reached"
    NO_SOLUTION = "no_solution"


@dataclass
class DecoderConfig:
    """Search knobs.

    ``beam_cutoff=math.inf`` disables beam pruning. Defaults follow the
    short-beam benchmark setting: beam 15, queue limit 200000, no-revisit on.
    """

    beam_cutoff: float = 15
    pq_limit: int = 200_000
    det_penalty: float = 0.0
    no_revisit: bool = True
    at_most_two_errors_per_detector: bool = False
    opt_level: OptLevel = OptLevel.L4
    hash_seed: int = 0

    def __post_init__(self) -> None:
        self.opt_level = OptLevel.parse(self.opt_level)
        if self.pq_limit < 1:
            raise ValueError("pq_limit must be >= 1")
        if not self.det_penalty >= 0:
            raise ValueError("det_penalty must be >= 0")
        if not self.beam_cutoff >= 0:
            raise ValueError("beam_cutoff must be >= 0")
        if self.beam_cutoff != math.inf:
            self.beam_cutoff = int(self.beam_cutoff)

    @classmethod
    def exact(cls, **overrides) -> "DecoderConfig":
        """All accuracy-trading heuristics off; pq_limit 10**6."""
        params = dict(
            beam_cutoff=math.inf,
            pq_limit=10**6,
            det_penalty=0.0,
            no_revisit=False,
            at_most_two_errors_per_detector=False,
        )
        params.update(overrides)
        return cls(**params)

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["opt_level"] = self.opt_level.name
        if out["beam_cutoff"] == math.inf:
            out["beam_cutoff"] = "inf"
        return out


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    nodes_pruned_beam: int = 0
    nodes_pruned_visited: int = 0
    nodes_pruned_blocked: int = 0
    detcost_calls: int = 0
    detcost_loop_iterations: int = 0
    detcost_early_exits: int = 0
    max_queue_size: int = 0

    def __iadd__(self, other: "SearchStats") -> "SearchStats":
        for f in fields(self):
            if f.name == "max_queue_size":
                self.max_queue_size = max(self.max_queue_size, other.max_queue_size)
            else:
                setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class DecodeResult:
    applied_errors: tuple[int, ...]
    predicted_observables: tuple[int, ...]
    cost: float
    status: Status
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def solved(self) -> bool:
        return self.status is Status.OPTIMAL
