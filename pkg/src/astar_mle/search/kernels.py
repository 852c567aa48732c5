"""Reference implementations of the search primitives.

These work on plain :class:`SearchNode` objects and favour clarity; the
engines in :mod:`astar_mle.search.engines` implement the same semantics on
level-specific layouts and are tested against these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from ..dem import DecoderContext, ErrorCost
from .config import DecoderConfig, OptLevel, SearchStats

INF = math.inf
MASK64 = (1 << 64) - 1

__all__ = [
    "DetectorCostTuple",
    "SearchNode",
    "start_node",
    "child_node",
    "replay_node",
    "build_detector_cost_tuples",
    "get_detcost_baseline",
    "get_detcost_optimized",
    "heuristic",
    "expand",
    "syndrome_fingerprint",
    "pack_bits",
    "predict_observables",
]


class DetectorCostTuple(NamedTuple):
    """Per-error record: blocked flag and number of currently fired detectors it touches.

    The engines store each record packed into one integer word,
    ``error_blocked << 32 | detectors_count``; see :meth:`pack`.
    """

    error_blocked: int
    detectors_count: int

    def pack(self) -> int:
        return (self.error_blocked << 32) | self.detectors_count

    @classmethod
    def unpack(cls, word: int) -> "DetectorCostTuple":
        return cls(word >> 32, word & 0xFFFFFFFF)


@dataclass
class SearchNode:
    applied_errors: tuple[int, ...]
    fired: list[int]
    num_fired: int
    cost_g: float
    blocked: list[bool]

    def lowest_fired(self) -> int:
        return self.fired.index(1)

    def fired_detectors(self) -> list[int]:
        return [d for d, b in enumerate(self.fired) if b]


def start_node(ctx: DecoderContext, syndrome: Sequence[int]) -> SearchNode:
    if len(syndrome) != ctx.num_detectors:
        raise ValueError(f"syndrome has {len(syndrome)} bits, model has {ctx.num_detectors} detectors")
    fired = [1 if b else 0 for b in syndrome]
    return SearchNode((), fired, sum(fired), 0.0, [False] * ctx.num_errors)


def child_node(node: SearchNode, ctx: DecoderContext, e: int, extra_blocked: Sequence[int] = ()) -> SearchNode:
    fired = list(node.fired)
    for d in ctx.error_detectors[e]:
        fired[d] ^= 1
    blocked = list(node.blocked)
    for b in extra_blocked:
        blocked[b] = True
    blocked[e] = True
    return SearchNode(
        node.applied_errors + (e,),
        fired,
        sum(fired),
        node.cost_g + ctx.error_lc[e],
        blocked,
    )


def replay_node(ctx: DecoderContext, syndrome: Sequence[int], applied: Sequence[int]) -> SearchNode:
    """Rebuild the node reached by applying ``applied`` in order from the start.

    Each step blocks every error preceding the applied one in the adjacency
    of the lowest fired detector, exactly as :func:`expand` does.
    """
    node = start_node(ctx, syndrome)
    for e in applied:
        row = ctx.d2e[node.lowest_fired()]
        node = child_node(node, ctx, e, row[: row.index(e)])
    return node


def build_detector_cost_tuples(node: SearchNode, ctx: DecoderContext) -> list[DetectorCostTuple]:
    counts = [0] * ctx.num_errors
    for d in node.fired_detectors():
        for e in ctx.d2e[d]:
            counts[e] += 1
    return [DetectorCostTuple(int(b), c) for b, c in zip(node.blocked, counts)]


def get_detcost_baseline(
    d: int,
    blocked: Sequence[bool],
    det_counts: Sequence[int],
    ctx: DecoderContext,
    config: DecoderConfig,
    stats: SearchStats | None = None,
) -> float:
    """Cheapest per-detector share among unblocked errors touching ``d``; scans all of them."""
    errors = ctx.model.errors
    min_cost = INF
    for ei in ctx.d2e[d]:
        if not blocked[ei]:
            min_cost = min(min_cost, errors[ei].likelihood_cost / det_counts[ei])
    if stats is not None:
        stats.detcost_calls += 1
        stats.detcost_loop_iterations += len(ctx.d2e[d])
    return min_cost + config.det_penalty


def get_detcost_optimized(
    d: int,
    tuples: Sequence[DetectorCostTuple],
    error_costs: Sequence[ErrorCost],
    ctx: DecoderContext,
    config: DecoderConfig,
    stats: SearchStats | None = None,
) -> float:
    """Same value as :func:`get_detcost_baseline`, stopping at the first entry
    whose lower bound cannot beat the running minimum."""
    min_cost = INF
    iterations = 0
    exited = False
    for ei in ctx.d2e[d]:
        iterations += 1
        ec = error_costs[ei]
        if ec.min_cost >= min_cost:
            exited = True
            break
        dct = tuples[ei]
        if not dct.error_blocked:
            min_cost = min(min_cost, ec.likelihood_cost / dct.detectors_count)
    if stats is not None:
        stats.detcost_calls += 1
        stats.detcost_loop_iterations += iterations
        stats.detcost_early_exits += exited
    return min_cost + config.det_penalty


def heuristic(
    node: SearchNode,
    ctx: DecoderContext,
    config: DecoderConfig,
    stats: SearchStats | None = None,
) -> float:
    """Sum of detector costs over fired detectors, ``inf`` if any is uncoverable.

    A lower bound on the remaining cost when ``det_penalty`` is zero.
    """
    tuples = build_detector_cost_tuples(node, ctx)
    total = 0.0
    for d in node.fired_detectors():
        c = get_detcost_optimized(d, tuples, ctx.error_costs, ctx, config, stats)
        if c == INF:
            return INF
        total += c
    return total


def _touch_counts(node: SearchNode, ctx: DecoderContext) -> list[int]:
    touch = [0] * ctx.num_detectors
    for e in node.applied_errors:
        for d in ctx.error_detectors[e]:
            touch[d] += 1
    return touch


def expand(node: SearchNode, ctx: DecoderContext, config: DecoderConfig) -> list[SearchNode]:
    """Children of ``node``: one per unblocked error on its lowest fired detector.

    Each child blocks the errors tried before it on that detector, so no
    error set is reachable along two paths.
    """
    if node.num_fired == 0:
        return []
    row = ctx.d2e[node.lowest_fired()]
    touch = _touch_counts(node, ctx) if config.at_most_two_errors_per_detector else None
    children = []
    tried: list[int] = []
    for e in row:
        if node.blocked[e]:
            continue
        if touch is not None and any(
            node.fired[d] and touch[d] >= 2 for d in ctx.error_detectors[e]
        ):
            tried.append(e)
            continue
        children.append(child_node(node, ctx, e, tried))
        tried.append(e)
    return children


def pack_bits(bits: Sequence[int]) -> int:
    """Little-endian bitset: bit ``i`` of the result is ``bits[i]``."""
    x = 0
    for i, b in enumerate(bits):
        if b:
            x |= 1 << i
    return x


def _elementwise_hash(bits: Sequence[int]) -> int:
    seed = len(bits)
    for el in bits:
        seed = (seed * 31 + el) & MASK64
    return seed


_MIX1 = 0x9E3779B97F4A7C15
_MIX2 = 0xBF58476D1CE4E5B9


def word_hash(x: int, nbits: int, seed: int = 0) -> int:
    """Hash a packed bitset one 64-bit word at a time (splitmix-style mixing)."""
    h = ((seed ^ nbits) * _MIX1) & MASK64
    for _ in range((nbits + 63) >> 6):
        h = ((h ^ (x & MASK64)) * _MIX2) & MASK64
        h ^= h >> 31
        x >>= 64
    return h


def syndrome_fingerprint(fired: Sequence[int], level: OptLevel | int | str = OptLevel.L0, seed: int = 0) -> int:
    """64-bit fingerprint of a fired-detector pattern.

    Below L4 this is the classic ``seed = seed * 31 + bit`` loop seeded with the
    pattern length; L4 hashes whole 64-bit words of the packed pattern.
    ``seed`` only affects L4.
    """
    if OptLevel.parse(level) < OptLevel.L4:
        return _elementwise_hash([1 if b else 0 for b in fired])
    return word_hash(pack_bits(fired), len(fired), seed)


def predict_observables(applied_errors: Sequence[int], ctx: DecoderContext) -> tuple[int, ...]:
    mask = 0
    for e in applied_errors:
        mask ^= ctx.error_obs_masks[e]
    return tuple((mask >> o) & 1 for o in range(ctx.num_observables))
