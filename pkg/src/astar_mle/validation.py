"""Input checks shared by the estimator classes."""

from __future__ import annotations

import os

import numpy as np
from sklearn.utils import check_array

from .dem import DetectorErrorModel, parse_dem
from .shots import Shot


def check_model(model) -> DetectorErrorModel:
    """Accept a :class:`DetectorErrorModel`, DEM text, or a path to a DEM file."""
    if isinstance(model, DetectorErrorModel):
        return model
    if isinstance(model, os.PathLike):
        with open(model) as fh:
            return parse_dem(fh.read())
    if isinstance(model, str):
        if "error(" in model or not model.strip():
            return parse_dem(model)
        with open(model) as fh:
            return parse_dem(fh.read())
    raise TypeError(f"expected a DetectorErrorModel, DEM text or path, got {type(model).__name__}")


def check_syndromes(X, num_detectors: int) -> np.ndarray:
    """Return ``X`` as a ``(n_shots, num_detectors)`` uint8 array of 0/1.

    ``X`` may also be a sequence of :class:`Shot`.
    """
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], Shot):
        X = [s.syndrome for s in X]
    if isinstance(X, (list, tuple)) and len(X) == 0:
        return np.zeros((0, num_detectors), dtype=np.uint8)
    X = check_array(
        X,
        dtype=None,
        ensure_2d=True,
        ensure_min_samples=0,
        ensure_min_features=0,
    )
    if X.shape[1] != num_detectors:
        raise ValueError(f"X has {X.shape[1]} columns; the model has {num_detectors} detectors")
    if X.size and not np.isin(X, (0, 1)).all():
        raise ValueError("syndromes must contain only 0 and 1")
    return X.astype(np.uint8, copy=False)
