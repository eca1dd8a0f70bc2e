"""
Modified Fiduccia-Mattheyses refinement

Moves are drawn only from the heavier part; a prefix of the move sequence
is eligible for commit only if the partition it leaves satisfies the
weighted balance tolerance.
"""

import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from qpart.core import rng
from qpart.core.errors import InvariantViolation
from qpart.models.graph import Assignment, WeightedGraph, balance_ok
from qpart.schemas.config import FmConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MoveRecord:
    """One FM move"""
    pass_index: int
    vertex: int
    gain: float
    cumulative_gain: float
    feasible: bool


class GainBuckets:
    """Integer-gain buckets; each bucket is a min-heap of vertex indices with lazy deletion"""

    def __init__(self):
        self.buckets: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
        self.key: Dict[int, Tuple[int, int]] = {}  # vertex -> (bucket, version)
        self._version = 0

    def push(self, v: int, gain: float) -> None:
        self._version += 1
        bucket = int(round(gain))
        self.key[v] = (bucket, self._version)
        heapq.heappush(self.buckets[bucket], (v, self._version))

    def remove(self, v: int) -> None:
        self.key.pop(v, None)

    def best(self) -> Optional[int]:
        """Vertex of maximum gain, lowest index first"""
        while self.buckets:
            top = max(self.buckets)
            heap = self.buckets[top]
            while heap:
                v, version = heap[0]
                if self.key.get(v) == (top, version):
                    return v
                heapq.heappop(heap)
            del self.buckets[top]
        return None


class GainHeap:
    """Max-heap on real gains with lazy invalidation"""

    def __init__(self):
        self.heap: List[Tuple[float, int, int]] = []
        self.version: Dict[int, int] = {}
        self._counter = 0

    def push(self, v: int, gain: float) -> None:
        self._counter += 1
        self.version[v] = self._counter
        heapq.heappush(self.heap, (-gain, v, self._counter))

    def remove(self, v: int) -> None:
        self.version.pop(v, None)

    def best(self) -> Optional[int]:
        while self.heap:
            _, v, version = self.heap[0]
            if self.version.get(v) == version:
                return v
            heapq.heappop(self.heap)
        return None


def vertex_gains(g: WeightedGraph, bits: np.ndarray) -> np.ndarray:
    """Cut reduction of moving each vertex to the other part"""
    adj = g.adjacency
    rows = np.repeat(np.arange(g.n_vertices), np.diff(adj.indptr))
    sign = np.where(bits[rows] != bits[adj.indices], 1.0, -1.0)
    return np.bincount(rows, weights=sign * adj.data, minlength=g.n_vertices)


def _integer_weights(g: WeightedGraph) -> bool:
    w = g.edge_weights
    return bool(np.all(w == np.round(w)))


def _audit_gains(g: WeightedGraph, bits: np.ndarray, gains: np.ndarray, locked: np.ndarray) -> None:
    scratch = vertex_gains(g, bits)
    open_ = ~locked
    scale = max(1.0, float(np.max(np.abs(scratch))) if scratch.size else 1.0)
    if np.any(np.abs(scratch[open_] - gains[open_]) > 1e-9 * scale):
        raise InvariantViolation("incremental FM gains diverged from recomputation")


class FmRefiner:
    """Modified FM passes under one balance tolerance"""

    def __init__(self, cfg: FmConfig):
        self.cfg = cfg

    def run_pass(
        self,
        g: WeightedGraph,
        bits_in: np.ndarray,
        move_log: Optional[List[MoveRecord]] = None,
        pass_index: int = 0,
    ) -> Tuple[np.ndarray, bool]:
        """One pass; returns the resulting bits and whether a prefix was committed"""
        cfg = self.cfg
        n = g.n_vertices
        bits = bits_in.astype(np.int8).copy()
        total = g.total_vertex_weight
        vw = g.vertex_weights
        adj = g.adjacency
        weights = [total - float(np.sum(vw[bits == 1])), float(np.sum(vw[bits == 1]))]

        gains = vertex_gains(g, bits)
        structure = GainBuckets if _integer_weights(g) else GainHeap
        sides = (structure(), structure())
        for v in range(n):
            sides[bits[v]].push(v, gains[v])
        locked = np.zeros(n, dtype=bool)

        input_feasible = balance_ok(max(weights), total, cfg.nu)
        best_prefix = 0 if input_feasible else None
        best_gain = 0.0
        cumulative = 0.0
        moves: List[int] = []

        while True:
            # equal weights count part 1 as the heavier one
            heavier = 1 if weights[1] >= weights[0] else 0
            v = sides[heavier].best()
            if v is None:
                break

            gain = gains[v]
            sides[heavier].remove(v)
            locked[v] = True
            bits[v] ^= 1
            weights[heavier] -= vw[v]
            weights[1 - heavier] += vw[v]
            cumulative += gain
            moves.append(v)

            lo, hi = adj.indptr[v], adj.indptr[v + 1]
            for u, w in zip(adj.indices[lo:hi], adj.data[lo:hi]):
                if locked[u]:
                    continue
                gains[u] += -2.0 * w if bits[u] == bits[v] else 2.0 * w
                sides[bits[u]].push(u, gains[u])

            feasible = balance_ok(max(weights), total, cfg.nu)
            if feasible and (best_prefix is None or cumulative > best_gain):
                best_prefix = len(moves)
                best_gain = cumulative
            if move_log is not None:
                move_log.append(MoveRecord(pass_index, int(v), float(gain), float(cumulative), feasible))
            if cfg.audit:
                _audit_gains(g, bits, gains, locked)

        if best_prefix is None or (input_feasible and best_gain <= 0):
            return bits_in.astype(np.int8).copy(), False

        # Roll back the moves after the best eligible prefix
        for v in moves[best_prefix:]:
            bits[v] ^= 1
        return bits, True

    def refine(
        self,
        g: WeightedGraph,
        x: Assignment,
        move_log: Optional[List[MoveRecord]] = None,
    ) -> Assignment:
        """Repeat passes until one commits nothing or max_passes is reached"""
        cfg = self.cfg
        passes = 1 if cfg.single_pass else cfg.max_passes
        bits = x.bits
        for t in range(passes):
            bits, committed = self.run_pass(g, bits, move_log, t)
            if not committed:
                break
        result = Assignment.of(g, bits)
        if x.is_feasible(cfg.nu) and result.cut > x.cut + 1e-9 * max(1.0, x.cut):
            raise InvariantViolation("FM increased the cut of a feasible assignment")
        return result

    def multi_start(
        self,
        g: WeightedGraph,
        n_trials: int,
        seed: int,
        index: Tuple[int, ...] = (),
        stream_name: str = rng.FM_SHUFFLE,
    ) -> Tuple[Optional[Assignment], Assignment]:
        """Refine `n_trials` cardinality-balanced random starts, trial t drawn from stream_name at (*index, t)

        Returns the minimum-cut feasible result (None if none is feasible) and
        the least-imbalanced result.
        """
        best_feasible: Optional[Assignment] = None
        least_imbalanced: Optional[Assignment] = None
        for t in range(n_trials):
            gen = rng.stream(seed, stream_name, *index, t)
            refined = self.refine(g, Assignment.of(g, random_balanced_bits(g.n_vertices, gen)))
            if refined.is_feasible(self.cfg.nu) and (best_feasible is None or refined.cut < best_feasible.cut):
                best_feasible = refined
            if least_imbalanced is None or refined.imbalance < least_imbalanced.imbalance:
                least_imbalanced = refined
        return best_feasible, least_imbalanced


def random_balanced_bits(n: int, gen: np.random.Generator) -> np.ndarray:
    """Uniformly random bipartition with floor(n/2) vertices in part 1"""
    bits = np.zeros(n, dtype=np.int8)
    bits[gen.permutation(n)[: n // 2]] = 1
    return bits


def fm_pass(
    g: WeightedGraph,
    x: Assignment,
    cfg: FmConfig,
    move_log: Optional[List[MoveRecord]] = None,
) -> Assignment:
    """One modified-FM pass with prefix rollback"""
    bits, _ = FmRefiner(cfg).run_pass(g, x.bits, move_log)
    return Assignment.of(g, bits)


def fm_refine(
    g: WeightedGraph,
    x: Assignment,
    cfg: FmConfig,
    move_log: Optional[List[MoveRecord]] = None,
) -> Assignment:
    return FmRefiner(cfg).refine(g, x, move_log)


def multi_start_fm(
    g: WeightedGraph,
    n_trials: int,
    cfg: FmConfig,
    seed: int,
    index: Tuple[int, ...] = (),
    stream_name: str = rng.FM_SHUFFLE,
) -> Tuple[Optional[Assignment], Assignment]:
    return FmRefiner(cfg).multi_start(g, n_trials, seed, index, stream_name)
