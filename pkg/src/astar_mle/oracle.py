"""Exact most-likely-error reference decoder for small models, and decoder cross-checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .dem import DecoderContext, DetectorErrorModel
from .search import DecoderConfig, Status, decode
from .shots import Shot

__all__ = [
    "MAX_ORACLE_ERRORS",
    "OracleSizeError",
    "OracleResult",
    "exact_mle",
    "exact_mle_bruteforce",
    "CrossCheckRow",
    "CrossCheckReport",
    "cross_check",
]

MAX_ORACLE_ERRORS = 25
TIE_TOL = 1e-12
MISMATCH_TOL = 1e-9


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    min_cost: float
    best_subset: tuple[int, ...]
    feasible: bool


def _masks(model: DetectorErrorModel) -> list[int]:
    out = []
    for err in model.errors:
        m = 0
        for d in err.detectors:
            m |= 1 << d
        out.append(m)
    return out


def _target(syndrome: Sequence[int]) -> int:
    t = 0
    for i, b in enumerate(syndrome):
        if b:
            t |= 1 << i
    return t


def _check(model: DetectorErrorModel, syndrome: Sequence[int], limit: int) -> None:
    if model.num_errors > limit:
        raise OracleSizeError(f"model has {model.num_errors} errors; exact oracle is limited to {limit}")
    if len(syndrome) != model.num_detectors:
        raise ValueError(f"syndrome has {len(syndrome)} bits, model has {model.num_detectors} detectors")


def _better(cost: float, subset: tuple[int, ...], best_cost: float, best: tuple[int, ...]) -> bool:
    if cost < best_cost - TIE_TOL:
        return True
    return abs(cost - best_cost) <= TIE_TOL and subset < best


def exact_mle(
    model: DetectorErrorModel,
    syndrome: Sequence[int],
    budget: float = math.inf,
) -> OracleResult:
    """Minimum-cost error subset reproducing ``syndrome``, by branch and bound.

    Errors are decided in index order; a branch is cut when its partial cost
    already exceeds the incumbent, or when some fired detector can no longer
    be reached by any undecided error. At most ``budget`` errors are used.
    Among optima equal to within 1e-12 the lexicographically smallest index
    list wins.
    """
    _check(model, syndrome, MAX_ORACLE_ERRORS)
    masks = _masks(model)
    costs = [e.likelihood_cost for e in model.errors]
    n = len(masks)
    reach = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        reach[i] = reach[i + 1] | masks[i]

    best_cost = math.inf
    best: tuple[int, ...] = ()
    chosen: list[int] = []

    def dfs(i: int, residual: int, cost: float) -> None:
        nonlocal best_cost, best
        if cost > best_cost + TIE_TOL:
            return
        if residual == 0:
            subset = tuple(chosen)
            if _better(cost, subset, best_cost, best):
                best_cost, best = cost, subset
            return
        if i == n or residual & ~reach[i] or len(chosen) >= budget:
            return
        chosen.append(i)
        dfs(i + 1, residual ^ masks[i], cost + costs[i])
        chosen.pop()
        dfs(i + 1, residual, cost)

    dfs(0, _target(syndrome), 0.0)
    if best_cost == math.inf:
        return OracleResult(math.inf, (), False)
    return OracleResult(best_cost, best, True)


def exact_mle_bruteforce(
    model: DetectorErrorModel,
    syndrome: Sequence[int],
    budget: float = math.inf,
) -> OracleResult:
    """Plain enumeration of all ``2**n`` subsets; for checking :func:`exact_mle`."""
    _check(model, syndrome, 15)
    masks = _masks(model)
    costs = [e.likelihood_cost for e in model.errors]
    target = _target(syndrome)
    best_cost = math.inf
    best: tuple[int, ...] = ()
    for bits in itertools.product((0, 1), repeat=len(masks)):
        subset = tuple(i for i, b in enumerate(bits) if b)
        if len(subset) > budget:
            continue
        acc = 0
        for i in subset:
            acc ^= masks[i]
        if acc != target:
            continue
        cost = 0.0
        for i in subset:
            cost += costs[i]
        if _better(cost, subset, best_cost, best):
            best_cost, best = cost, subset
    if best_cost == math.inf:
        return OracleResult(math.inf, (), False)
    return OracleResult(best_cost, best, True)


@dataclass(frozen=True)
class CrossCheckRow:
    shot: int
    decoder_cost: float
    oracle_cost: float
    status: Status
    feasible: bool
    observables_match: bool
    mismatch: bool

    @property
    def gap(self) -> float:
        if not self.feasible or self.status is not Status.OPTIMAL:
            return math.nan
        return self.decoder_cost - self.oracle_cost

    def format(self) -> str:
        return (
            f"{self.shot}\t{self.decoder_cost:.12g}\t{self.oracle_cost:.12g}\t"
            f"{self.gap:.3g}\t{self.status.value}\t{'MISMATCH' if self.mismatch else 'ok'}"
        )


@dataclass
class CrossCheckReport:
    rows: list[CrossCheckRow] = field(default_factory=list)
    heuristics_off: bool = False

    @property
    def mismatches(self) -> int:
        return sum(r.mismatch for r in self.rows)

    def format(self) -> str:
        header = "shot\tdecoder_cost\toracle_cost\tgap\tstatus\tflag\n"
        body = "".join(r.format() + "\n" for r in self.rows)
        return header + body + f"# shots={len(self.rows)} mismatches={self.mismatches}\n"


def _heuristics_off(config: DecoderConfig) -> bool:
    return (
        config.beam_cutoff == math.inf
        and not config.no_revisit
        and not config.at_most_two_errors_per_detector
        and config.det_penalty == 0
    )


def cross_check(ctx: DecoderContext, config: DecoderConfig, shots: Sequence[Shot]) -> CrossCheckReport:
    """Decode every shot and compare against :func:`exact_mle`.

    A row is flagged when the decoder should be exact (no beam, no revisit
    pruning, no two-error cap, no penalty) yet its answer differs from the
    oracle: cost off by more than 1e-9, or solved/infeasible disagreeing.
    Queue-limit give-ups are reported but not flagged.
    """
    if ctx.num_errors > MAX_ORACLE_ERRORS:
        raise OracleSizeError(
            f"model has {ctx.num_errors} errors; exact oracle is limited to {MAX_ORACLE_ERRORS}"
        )
    exact = _heuristics_off(config)
    report = CrossCheckReport(heuristics_off=exact)
    for i, shot in enumerate(shots):
        res = decode(ctx, shot.syndrome, config)
        ora = exact_mle(ctx.model, shot.syndrome)
        if res.status is Status.QUEUE_LIMIT:
            bad = False
        elif not ora.feasible:
            bad = res.status is not Status.NO_SOLUTION
        else:
            bad = res.status is not Status.OPTIMAL or abs(res.cost - ora.min_cost) > MISMATCH_TOL
        obs_ok = False
        if ora.feasible and res.status is Status.OPTIMAL:
            ora_obs = 0
            dec_obs = 0
            for e in ora.best_subset:
                ora_obs ^= ctx.error_obs_masks[e]
            for e in res.applied_errors:
                dec_obs ^= ctx.error_obs_masks[e]
            obs_ok = ora_obs == dec_obs
        report.rows.append(
            CrossCheckRow(
                shot=i,
                decoder_cost=res.cost,
                oracle_cost=ora.min_cost,
                status=res.status,
                feasible=ora.feasible,
                observables_match=obs_ok,
                mismatch=exact and bad,
            )
        )
    return report
