"""Small self-contained models with repetition-code and surface-code-like structure."""

from __future__ import annotations

from .dem import DetectorErrorModel

__all__ = ["chain_model", "grid_model", "make_synthetic_model"]


def chain_model(n: int, p: float) -> DetectorErrorModel:
    """Repetition-code-like chain: ``n`` detectors, ``n + 1`` errors.

    Error ``i`` fires detectors ``{i - 1, i}`` clipped to the chain; error 0 also
    flips observable 0.
    """
    if n < 1:
        raise ValueError("chain needs n >= 1")
    mechanisms = []
    for i in range(n + 1):
        dets = [d for d in (i - 1, i) if 0 <= d < n]
        mechanisms.append((p, dets, [0] if i == 0 else []))
    return DetectorErrorModel.from_mechanisms(mechanisms, num_detectors=n, num_observables=1)


def grid_model(w: int, h: int, p: float) -> DetectorErrorModel:
    """Planar matching graph on a ``w`` x ``h`` lattice of detectors.

    Bulk errors join horizontal and vertical neighbours; each row has a
    boundary error on its left end (flipping observable 0) and right end.
    Detector ``(x, y)`` has index ``y * w + x``.
    """
    if w < 1 or h < 1:
        raise ValueError("grid needs w, h >= 1")
    mechanisms = []
    for y in range(h):
        row = y * w
        mechanisms.append((p, [row], [0]))
        for x in range(w - 1):
            mechanisms.append((p, [row + x, row + x + 1], []))
        mechanisms.append((p, [row + w - 1], []))
    for y in range(h - 1):
        for x in range(w):
            mechanisms.append((p, [y * w + x, (y + 1) * w + x], []))
    return DetectorErrorModel.from_mechanisms(mechanisms, num_detectors=w * h, num_observables=1)


def make_synthetic_model(kind: str, *size: int, p: float) -> DetectorErrorModel:
    if kind == "chain":
        if len(size) != 1:
            raise ValueError("chain takes one size parameter")
        return chain_model(size[0], p)
    if kind == "grid":
        if len(size) != 2:
            raise ValueError("grid takes two size parameters")
        return grid_model(size[0], size[1], p)
    raise ValueError(f"unknown synthetic model kind {kind!r}")
