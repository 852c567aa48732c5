"""A* most-likely-error search over error configurations."""

from .config import DecodeResult, DecoderConfig, OptLevel, SearchStats, Status
from .engines import decode, make_engine
from .kernels import (
    DetectorCostTuple,
    SearchNode,
    build_detector_cost_tuples,
    expand,
    get_detcost_baseline,
    get_detcost_optimized,
    heuristic,
    predict_observables,
    replay_node,
    start_node,
    syndrome_fingerprint,
)

__all__ = [
    "DecodeResult",
    "DecoderConfig",
    "DetectorCostTuple",
    "OptLevel",
    "SearchNode",
    "SearchStats",
    "Status",
    "build_detector_cost_tuples",
    "decode",
    "expand",
    "get_detcost_baseline",
    "get_detcost_optimized",
    "heuristic",
    "make_engine",
    "predict_observables",
    "replay_node",
    "start_node",
    "syndrome_fingerprint",
]
