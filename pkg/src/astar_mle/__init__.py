"""Most-likely-error decoding of detector error models by A* search."""

from .dem import (
    DecoderContext,
    DetectorErrorModel,
    ErrorCost,
    ErrorMechanism,
    build_context,
    likelihood_cost,
    parse_dem,
    serialize_dem,
)
from .search import DecodeResult, DecoderConfig, OptLevel, SearchStats, Status, decode
from .shots import Shot, read_shots, sample_shots, write_predictions, write_shots

__version__ = "0.1.0"
