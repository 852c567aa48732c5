"""scikit-learn style front ends: ``fit`` on a detector error model, ``predict`` observables."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .dem import build_context
from .oracle import exact_mle
from .search import DecodeResult, DecoderConfig, make_engine
from .validation import check_model, check_syndromes

__all__ = ["MLEDecoder", "ExactMLEDecoder"]


class _DecoderMixin:
    def _fit_model(self, model):
        model = check_model(model)
        self.model_ = model
        self.context_ = build_context(model)
        self.n_features_in_ = model.num_detectors
        self.n_observables_ = model.num_observables
        return self

    def predict(self, X) -> np.ndarray:
        """Predicted observable flips, shape ``(n_shots, n_observables)``."""
        check_is_fitted(self, "context_")
        all_applied = self._applied(X)
        out = np.zeros((len(all_applied), self.n_observables_), dtype=np.uint8)
        masks = self.context_.error_obs_masks
        for i, applied in enumerate(all_applied):
            acc = 0
            for e in applied:
                acc ^= masks[e]
            for o in range(self.n_observables_):
                out[i, o] = (acc >> o) & 1
        return out

    def score(self, X, y) -> float:
        """Fraction of shots whose full observable vector is predicted correctly."""
        y = np.asarray(y, dtype=np.uint8).reshape(len(y), -1)
        pred = self.predict(X)
        if len(pred) == 0:
            return 1.0
        return float(np.mean(np.all(pred == y, axis=1)))


class MLEDecoder(_DecoderMixin, BaseEstimator):
    """A* most-likely-error decoder.

    Parameters mirror :class:`~astar_mle.search.DecoderConfig`. ``fit`` takes
    a detector error model (object, DEM text or file path); ``predict`` takes
    an ``(n_shots, n_detectors)`` 0/1 array or a list of shots.

    Shots that hit the queue limit or have no solution predict all zeros;
    use :meth:`decode` to see per-shot status.
    """

    def __init__(
        self,
        beam_cutoff=15,
        pq_limit=200_000,
        det_penalty=0.0,
        no_revisit=True,
        at_most_two_errors_per_detector=False,
        opt_level="L4",
        hash_seed=0,
    ):
        self.beam_cutoff = beam_cutoff
        self.pq_limit = pq_limit
        self.det_penalty = det_penalty
        self.no_revisit = no_revisit
        self.at_most_two_errors_per_detector = at_most_two_errors_per_detector
        self.opt_level = opt_level
        self.hash_seed = hash_seed

    def fit(self, X, y=None):
        self._fit_model(X)
        self.config_ = DecoderConfig(
            beam_cutoff=math.inf if self.beam_cutoff is None else self.beam_cutoff,
            pq_limit=self.pq_limit,
            det_penalty=self.det_penalty,
            no_revisit=self.no_revisit,
            at_most_two_errors_per_detector=self.at_most_two_errors_per_detector,
            opt_level=self.opt_level,
            hash_seed=self.hash_seed,
        )
        return self

    def decode(self, X) -> list[DecodeResult]:
        check_is_fitted(self, "context_")
        X = check_syndromes(X, self.n_features_in_)
        engine = make_engine(self.context_, self.config_)
        return [engine.decode(row.tolist()) for row in X]

    def _applied(self, X):
        return [r.applied_errors for r in self.decode(X)]


class ExactMLEDecoder(_DecoderMixin, BaseEstimator):
    """Exhaustive branch-and-bound decoder for models with at most 25 errors."""

    def __init__(self, budget=None):
        self.budget = budget

    def fit(self, X, y=None):
        return self._fit_model(X)

    def _applied(self, X):
        check_is_fitted(self, "context_")
        X = check_syndromes(X, self.n_features_in_)
        budget = math.inf if self.budget is None else self.budget
        return [exact_mle(self.model_, row.tolist(), budget).best_subset for row in X]
