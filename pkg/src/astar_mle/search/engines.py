"""A* search engines, one per optimization level.

All engines run the same best-first loop (:meth:`_Engine.decode`) and differ
only in how per-node state is laid out and scanned. A node in the queue is
just ``(f, num_fired, seq, cost_g, applied, fingerprint, pattern)``; its
fired pattern, blocked set and per-error fired counts are rebuilt by
replaying ``applied`` when it is popped.

Every engine must produce bit-identical ``f`` values for the same node, so
heuristic sums always run over fired detectors in ascending order and path
costs accumulate in applied order.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, Iterator, Sequence

from ..dem import DecoderContext
from .config import DecodeResult, DecoderConfig, OptLevel, SearchStats, Status
from .kernels import MASK64, predict_observables, word_hash

INF = math.inf
BLOCKED = 1 << 32  # error_blocked field of a packed DetectorCostTuple word

Observer = Callable[[tuple[int, ...]], None]


class _Engine:
    level: OptLevel

    def __init__(self, ctx: DecoderContext, config: DecoderConfig, observer: Observer | None = None):
        self.ctx = ctx
        self.config = config
        self.observer = observer
        self.penalty = float(config.det_penalty)
        self.n_det = ctx.num_detectors
        self.n_err = ctx.num_errors
        self._reset_counters()

    def _reset_counters(self) -> None:
        self.calls = 0
        self.iters = 0
        self.exits = 0

    # -- per-level hooks -------------------------------------------------
    def _load(self, syndrome: Sequence[int]) -> None:
        raise NotImplementedError

    def _restore(self, applied: tuple[int, ...]):
        raise NotImplementedError

    def _children(self, state, amt_touch) -> Iterator[tuple[int, float, int, int, object]]:
        """Yield ``(error, h, num_fired, fingerprint, pattern)`` per child."""
        raise NotImplementedError

    def _start_h(self, state) -> tuple[float, int]:
        raise NotImplementedError

    def _fingerprint(self, state) -> tuple[int, object]:
        raise NotImplementedError

    # -- shared search loop ----------------------------------------------
    def _touch(self, applied: tuple[int, ...]) -> list[int]:
        touch = [0] * self.n_det
        edets = self.ctx.error_detectors
        for e in applied:
            for d in edets[e]:
                touch[d] += 1
        return touch

    def decode(self, syndrome: Sequence[int]) -> DecodeResult:
        ctx, cfg = self.ctx, self.config
        if len(syndrome) != self.n_det:
            raise ValueError(f"syndrome has {len(syndrome)} bits, model has {self.n_det} detectors")
        self._reset_counters()
        stats = SearchStats()
        self._load(syndrome)
        state = self._restore(())
        h0, k0 = self._start_h(state)
        if k0 == 0:
            return self._finish(DecodeResult((), predict_observables((), ctx), 0.0, Status.OPTIMAL, stats))
        if h0 == INF:
            return self._finish(self._fail(Status.NO_SOLUTION, stats))

        lc = ctx.error_lc
        beam = cfg.beam_cutoff
        pq_limit = cfg.pq_limit
        amt = cfg.at_most_two_errors_per_detector
        observer = self.observer
        visited: dict[int, object] | None = {} if cfg.no_revisit else None
        collided: set = set()
        fp0, key0 = self._fingerprint(state) if visited is not None else (0, None)

        heap = [(h0, k0, 0, 0.0, (), fp0, key0)]
        seq = 1
        min_fired = k0
        max_q = 1
        pop, push = heapq.heappop, heapq.heappush
        n_expanded = n_beam = n_visited = n_blocked = 0

        while heap:
            f, k, _, g, applied, fp, key = pop(heap)
            if k == 0:
                stats.nodes_expanded = n_expanded
                stats.nodes_pruned_beam = n_beam
                stats.nodes_pruned_visited = n_visited
                stats.nodes_pruned_blocked = n_blocked
                stats.max_queue_size = max_q
                return self._finish(
                    DecodeResult(applied, predict_observables(applied, ctx), g, Status.OPTIMAL, stats)
                )
            if k > min_fired + beam:
                n_beam += 1
                continue
            if k < min_fired:
                min_fired = k
            if visited is not None:
                prev = visited.get(fp)
                if prev is None:
                    visited[fp] = key
                elif prev == key or (fp, key) in collided:
                    n_visited += 1
                    continue
                else:
                    collided.add((fp, key))
            n_expanded += 1

            state = self._restore(applied)
            touch = self._touch(applied) if amt else None
            for e, h, ck, cfp, ckey in self._children(state, touch):
                child = applied + (e,)
                if observer is not None:
                    observer(child)
                if h == INF:
                    n_blocked += 1
                    continue
                if ck > min_fired + beam:
                    n_beam += 1
                    continue
                if visited is not None:
                    prev = visited.get(cfp)
                    if prev is not None and (prev == ckey or (cfp, ckey) in collided):
                        n_visited += 1
                        continue
                if len(heap) >= pq_limit:
                    stats.nodes_expanded = n_expanded
                    stats.nodes_pruned_beam = n_beam
                    stats.nodes_pruned_visited = n_visited
                    stats.nodes_pruned_blocked = n_blocked
                    stats.max_queue_size = max(max_q, len(heap))
                    return self._finish(self._fail(Status.QUEUE_LIMIT, stats))
                cg = g + lc[e]
                push(heap, (cg + h, ck, seq, cg, child, cfp, ckey))
                seq += 1
            if len(heap) > max_q:
                max_q = len(heap)

        stats.nodes_expanded = n_expanded
        stats.nodes_pruned_beam = n_beam
        stats.nodes_pruned_visited = n_visited
        stats.nodes_pruned_blocked = n_blocked
        stats.max_queue_size = max_q
        return self._finish(self._fail(Status.NO_SOLUTION, stats))

    def _fail(self, status: Status, stats: SearchStats) -> DecodeResult:
        return DecodeResult((), (0,) * self.ctx.num_observables, INF, status, stats)

    def _finish(self, result: DecodeResult) -> DecodeResult:
        result.stats.detcost_calls = self.calls
        result.stats.detcost_loop_iterations = self.iters
        result.stats.detcost_early_exits = self.exits
        return result

    def _amt_skip(self, e: int, is_fired: Callable[[int], int], touch: list[int]) -> bool:
        for d in self.ctx.error_detectors[e]:
            if touch[d] >= 2 and is_fired(d):
                return True
        return False


def _element_hash(pattern: Sequence[int]) -> int:
    seed = len(pattern)
    for el in pattern:
        seed = (seed * 31 + el) & MASK64
    return seed


# ---------------------------------------------------------------------------
# L0: bit-packed flags accessed through shift/mask helpers.


def _get_bit(buf: bytearray, i: int) -> int:
    return (buf[i >> 3] >> (i & 7)) & 1


def _set_bit(buf: bytearray, i: int) -> None:
    buf[i >> 3] |= 1 << (i & 7)


def _flip_bit(buf: bytearray, i: int) -> None:
    buf[i >> 3] ^= 1 << (i & 7)


class _L0Engine(_Engine):
    level = OptLevel.L0

    def _load(self, syndrome):
        buf = bytearray((self.n_det + 7) >> 3)
        for i, b in enumerate(syndrome):
            if b:
                _set_bit(buf, i)
        self.syndrome = bytes(buf)

    def _lowest(self, fired):
        for i in range(self.n_det):
            if _get_bit(fired, i):
                return i
        return -1

    def _restore(self, applied):
        ctx = self.ctx
        d2e, edets = ctx.d2e, ctx.error_detectors
        fired = bytearray(self.syndrome)
        blocked = bytearray((self.n_err + 7) >> 3)
        for e in applied:
            for e2 in d2e[self._lowest(fired)]:
                if e2 == e:
                    break
                _set_bit(blocked, e2)
            _set_bit(blocked, e)
            for d in edets[e]:
                _flip_bit(fired, d)
        counts = [0] * self.n_err
        for d in range(self.n_det):
            if _get_bit(fired, d):
                for e2 in d2e[d]:
                    counts[e2] += 1
        return fired, blocked, counts

    def _flip(self, fired, counts, e):
        d2e = self.ctx.d2e
        for d in self.ctx.error_detectors[e]:
            delta = -1 if _get_bit(fired, d) else 1
            _flip_bit(fired, d)
            for e2 in d2e[d]:
                counts[e2] += delta

    def _h(self, fired, blocked, counts):
        d2e = self.ctx.d2e
        errors = self.ctx.model.errors
        pen = self.penalty
        h = 0.0
        k = 0
        for d in range(self.n_det):
            if not _get_bit(fired, d):
                continue
            k += 1
            row = d2e[d]
            self.calls += 1
            self.iters += len(row)
            m = INF
            for ei in row:
                if not _get_bit(blocked, ei):
                    c = errors[ei].likelihood_cost / counts[ei]
                    if c < m:
                        m = c
            if m == INF:
                return INF, k
            h += m + pen
        return h, k

    def _start_h(self, state):
        return self._h(*state)

    def _fingerprint(self, state):
        fired = state[0]
        seed = self.n_det
        for i in range(self.n_det):
            seed = (seed * 31 + _get_bit(fired, i)) & MASK64
        return seed, bytes(fired)

    def _children(self, state, touch):
        fired, blocked, counts = state
        want_fp = self.config.no_revisit
        is_fired = lambda d: _get_bit(fired, d)  # noqa: E731
        for e in self.ctx.d2e[self._lowest(fired)]:
            if _get_bit(blocked, e):
                continue
            _set_bit(blocked, e)
            if touch is not None and self._amt_skip(e, is_fired, touch):
                continue
            self._flip(fired, counts, e)
            h, k = self._h(fired, blocked, counts)
            fp, key = self._fingerprint(state) if want_fp else (0, None)
            self._flip(fired, counts, e)
            yield e, h, k, fp, key


# ---------------------------------------------------------------------------
# L1: one byte per flag.


class _L1Engine(_Engine):
    level = OptLevel.L1

    def _load(self, syndrome):
        self.syndrome = bytes(1 if b else 0 for b in syndrome)

    def _restore(self, applied):
        ctx = self.ctx
        d2e, edets = ctx.d2e, ctx.error_detectors
        fired = bytearray(self.syndrome)
        blocked = bytearray(self.n_err)
        for e in applied:
            for e2 in d2e[fired.find(1)]:
                if e2 == e:
                    break
                blocked[e2] = 1
            blocked[e] = 1
            for d in edets[e]:
                fired[d] ^= 1
        counts = [0] * self.n_err
        d = fired.find(1)
        while d >= 0:
            for e2 in d2e[d]:
                counts[e2] += 1
            d = fired.find(1, d + 1)
        return fired, blocked, counts

    def _flip(self, fired, counts, e):
        d2e = self.ctx.d2e
        for d in self.ctx.error_detectors[e]:
            if fired[d]:
                fired[d] = 0
                for e2 in d2e[d]:
                    counts[e2] -= 1
            else:
                fired[d] = 1
                for e2 in d2e[d]:
                    counts[e2] += 1

    def _h(self, fired, blocked, counts):
        d2e = self.ctx.d2e
        errors = self.ctx.model.errors
        pen = self.penalty
        h = 0.0
        k = 0
        d = fired.find(1)
        while d >= 0:
            k += 1
            row = d2e[d]
            self.calls += 1
            self.iters += len(row)
            m = INF
            for ei in row:
                if not blocked[ei]:
                    c = errors[ei].likelihood_cost / counts[ei]
                    if c < m:
                        m = c
            if m == INF:
                return INF, k
            h += m + pen
            d = fired.find(1, d + 1)
        return h, k

    def _start_h(self, state):
        return self._h(*state)

    def _fingerprint(self, state):
        fired = state[0]
        return _element_hash(fired), bytes(fired)

    def _children(self, state, touch):
        fired, blocked, counts = state
        want_fp = self.config.no_revisit
        for e in self.ctx.d2e[fired.find(1)]:
            if blocked[e]:
                continue
            blocked[e] = 1
            if touch is not None and self._amt_skip(e, fired.__getitem__, touch):
                continue
            self._flip(fired, counts, e)
            h, k = self._h(fired, blocked, counts)
            fp, key = (_element_hash(fired), bytes(fired)) if want_fp else (0, None)
            self._flip(fired, counts, e)
            yield e, h, k, fp, key


# ---------------------------------------------------------------------------
# L2: blocked flag and fired count fused into one DetectorCostTuple word per error.


class _L2Engine(_L1Engine):
    level = OptLevel.L2

    def _restore(self, applied):
        ctx = self.ctx
        d2e, edets = ctx.d2e, ctx.error_detectors
        fired = bytearray(self.syndrome)
        dct = [0] * self.n_err
        for e in applied:
            for e2 in d2e[fired.find(1)]:
                if e2 == e:
                    break
                dct[e2] |= BLOCKED
            dct[e] |= BLOCKED
            for d in edets[e]:
                fired[d] ^= 1
        d = fired.find(1)
        while d >= 0:
            for e2 in d2e[d]:
                dct[e2] += 1
            d = fired.find(1, d + 1)
        return fired, dct

    def _flip(self, fired, dct, e):
        d2e = self.ctx.d2e
        for d in self.ctx.error_detectors[e]:
            if fired[d]:
                fired[d] = 0
                for e2 in d2e[d]:
                    dct[e2] -= 1
            else:
                fired[d] = 1
                for e2 in d2e[d]:
                    dct[e2] += 1

    def _h(self, fired, dct):
        d2e = self.ctx.d2e
        lc = self.ctx.error_lc
        pen = self.penalty
        h = 0.0
        k = 0
        d = fired.find(1)
        while d >= 0:
            k += 1
            row = d2e[d]
            self.calls += 1
            self.iters += len(row)
            m = INF
            for ei in row:
                t = dct[ei]
                if t < BLOCKED:
                    c = lc[ei] / t
                    if c < m:
                        m = c
            if m == INF:
                return INF, k
            h += m + pen
            d = fired.find(1, d + 1)
        return h, k

    def _children(self, state, touch):
        fired, dct = state
        want_fp = self.config.no_revisit
        for e in self.ctx.d2e[fired.find(1)]:
            if dct[e] >= BLOCKED:
                continue
            dct[e] |= BLOCKED
            if touch is not None and self._amt_skip(e, fired.__getitem__, touch):
                continue
            self._flip(fired, dct, e)
            h, k = self._h(fired, dct)
            fp, key = (_element_hash(fired), bytes(fired)) if want_fp else (0, None)
            self._flip(fired, dct, e)
            yield e, h, k, fp, key


# ---------------------------------------------------------------------------
# L3: adjacency pre-sorted by cost lower bound; detcost exits early.


class _L3Engine(_L2Engine):
    level = OptLevel.L3

    def _h(self, fired, dct):
        d2e_costs = self.ctx.d2e_costs
        pen = self.penalty
        h = 0.0
        k = 0
        iters = 0
        exits = 0
        d = fired.find(1)
        while d >= 0:
            k += 1
            m = INF
            row = d2e_costs[d]
            for i, (ei, lc, mc) in enumerate(row):
                if mc >= m:
                    iters += i + 1
                    exits += 1
                    break
                t = dct[ei]
                if t < BLOCKED:
                    c = lc / t
                    if c < m:
                        m = c
            else:
                iters += len(row)
            if m == INF:
                self.calls += k
                self.iters += iters
                self.exits += exits
                return INF, k
            h += m + pen
            d = fired.find(1, d + 1)
        self.calls += k
        self.iters += iters
        self.exits += exits
        return h, k


# ---------------------------------------------------------------------------
# L4: fired pattern as a word-packed int; XOR updates and word-wise hashing.


class _L4Engine(_L3Engine):
    level = OptLevel.L4

    def _load(self, syndrome):
        x = 0
        for i, b in enumerate(syndrome):
            if b:
                x |= 1 << i
        self.syndrome = x

    def _restore(self, applied):
        ctx = self.ctx
        d2e, masks = ctx.d2e, ctx.error_det_masks
        fired = self.syndrome
        dct = [0] * self.n_err
        for e in applied:
            for e2 in d2e[(fired & -fired).bit_length() - 1]:
                if e2 == e:
                    break
                dct[e2] |= BLOCKED
            dct[e] |= BLOCKED
            fired ^= masks[e]
        x = fired
        while x:
            low = x & -x
            for e2 in d2e[low.bit_length() - 1]:
                dct[e2] += 1
            x ^= low
        return fired, dct

    def _h(self, fired, dct):
        d2e_costs = self.ctx.d2e_costs
        pen = self.penalty
        h = 0.0
        k = 0
        iters = 0
        exits = 0
        x = fired
        while x:
            low = x & -x
            x ^= low
            k += 1
            m = INF
            row = d2e_costs[low.bit_length() - 1]
            for i, (ei, lc, mc) in enumerate(row):
                if mc >= m:
                    iters += i + 1
                    exits += 1
                    break
                t = dct[ei]
                if t < BLOCKED:
                    c = lc / t
                    if c < m:
                        m = c
            else:
                iters += len(row)
            if m == INF:
                self.calls += k
                self.iters += iters
                self.exits += exits
                return INF, k
            h += m + pen
        self.calls += k
        self.iters += iters
        self.exits += exits
        return h, k

    def _fingerprint(self, state):
        fired = state[0]
        return word_hash(fired, self.n_det, self.config.hash_seed), fired

    def _children(self, state, touch):
        fired, dct = state
        ctx = self.ctx
        d2e, edets, masks = ctx.d2e, ctx.error_detectors, ctx.error_det_masks
        want_fp = self.config.no_revisit
        n_det, seed = self.n_det, self.config.hash_seed
        is_fired = lambda d: (fired >> d) & 1  # noqa: E731
        for e in d2e[(fired & -fired).bit_length() - 1]:
            if dct[e] >= BLOCKED:
                continue
            dct[e] |= BLOCKED
            if touch is not None and self._amt_skip(e, is_fired, touch):
                continue
            dets = edets[e]
            for d in dets:
                delta = -1 if (fired >> d) & 1 else 1
                for e2 in d2e[d]:
                    dct[e2] += delta
            child = fired ^ masks[e]
            h, k = self._h(child, dct)
            fp = word_hash(child, n_det, seed) if want_fp else 0
            for d in dets:
                delta = 1 if (fired >> d) & 1 else -1
                for e2 in d2e[d]:
                    dct[e2] += delta
            yield e, h, k, fp, child


ENGINES: dict[OptLevel, type[_Engine]] = {
    OptLevel.L0: _L0Engine,
    OptLevel.L1: _L1Engine,
    OptLevel.L2: _L2Engine,
    OptLevel.L3: _L3Engine,
    OptLevel.L4: _L4Engine,
}


def make_engine(ctx: DecoderContext, config: DecoderConfig, observer: Observer | None = None) -> _Engine:
    return ENGINES[config.opt_level](ctx, config, observer)


def decode(
    ctx: DecoderContext,
    syndrome: Sequence[int],
    config: DecoderConfig | None = None,
    observer: Observer | None = None,
) -> DecodeResult:
    """Find the lowest-cost error set whose detector parity equals ``syndrome``.

    ``observer``, if given, is called with the applied-error tuple of every
    generated child node, before pruning.
    """
    return make_engine(ctx, config or DecoderConfig(), observer).decode(syndrome)
