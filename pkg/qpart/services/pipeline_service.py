"""
Coarsen-solve-lift orchestration shared by the partition and order commands
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from qpart.core import rng
from qpart.core.config import settings
from qpart.core.errors import InputError
from qpart.models.graph import Assignment, WeightedGraph
from qpart.models.coarse import ScreeningResult
from qpart.models.objective import GppObjective
from qpart.models.ordering import BlockPartition, DissectionResult, FactorStats
from qpart.models.pool import PoolEntry, SolutionPool
from qpart.models.quantum import bitstring_to_bits
from qpart.schemas.config import FmConfig, IterationConfig, RunConfig, ScreeningConfig
from qpart.services import (
    coarsen_service,
    fm_service,
    graph_service,
    iterative_service,
    ordering_service,
    qaoa_service,
)

logger = logging.getLogger(__name__)

QUANTUM = "quantum"
CLASSICAL = "classical"

DEFAULT_COARSE_K = 16


@dataclass(frozen=True, eq=False)
class RankedCandidate:
    """Pool entry lifted, refined and scored by one-level dissection"""

    entry: PoolEntry
    assignment: Assignment
    separator_size: int
    stats: FactorStats


@dataclass(frozen=True, eq=False)
class PartitionOutcome:
    """Refined fine-graph bipartition and everything that led to it"""

    assignment: Assignment
    screening: ScreeningResult
    strategy: str
    pool: Optional[SolutionPool] = None
    candidates: List[RankedCandidate] = field(default_factory=list)


def coarse_size(g: WeightedGraph, k: Optional[int]) -> int:
    """Requested coarse size, or min(16, n) when unset"""
    return k if k is not None else min(DEFAULT_COARSE_K, g.n_vertices)


def _screen(g: WeightedGraph, cfg: ScreeningConfig) -> ScreeningResult:
    return coarsen_service.screen_coarsenings(graph_service.normalize_weights(g), cfg)


def _lift_and_refine(g: WeightedGraph, screening: ScreeningResult, coarse_bits, fm_cfg: FmConfig) -> Assignment:
    fine = coarsen_service.lift(coarse_bits, screening.coarse_map)
    return fm_service.fm_refine(g, Assignment.of(g, fine), fm_cfg)


def classical_partition(g: WeightedGraph, screening_cfg: ScreeningConfig, fm_cfg: FmConfig) -> PartitionOutcome:
    """Screened coarsening, the screening's best coarse cut lifted, full FM"""
    screening = _screen(g, screening_cfg)
    assignment = _lift_and_refine(g, screening, screening.best_bits, fm_cfg)
    return PartitionOutcome(assignment, screening, CLASSICAL)


def _best_feasible_entry(pool: SolutionPool, coarse: WeightedGraph, nu: float) -> Optional[PoolEntry]:
    for entry in pool.ranked():
        if Assignment.of(coarse, bitstring_to_bits(entry.bitstring)).is_feasible(nu):
            return entry
    return None


def quantum_partition(
    g: WeightedGraph,
    screening_cfg: ScreeningConfig,
    iteration_cfg: IterationConfig,
    fm_cfg: FmConfig,
    lam: float = settings.DEFAULT_LAMBDA,
    rank_candidates: int = 0,
) -> PartitionOutcome:
    """Screen, run iterative QAOA on the coarse graph, lift the best feasible entry, refine"""
    qaoa_service.check_qubit_cap(screening_cfg.k)
    screening = _screen(g, screening_cfg)
    coarse = graph_service.normalize_weights(screening.coarse_map.coarse)
    obj = GppObjective(coarse, lam=lam, nu=fm_cfg.nu)
    pool = iterative_service.run_iterative_qaoa(obj, iteration_cfg)

    entry = _best_feasible_entry(pool, coarse, fm_cfg.nu)
    if entry is None:
        logger.warning("No feasible coarse bitstring in the pool; lifting the screening bipartition")
        coarse_bits = screening.best_bits
    else:
        coarse_bits = bitstring_to_bits(entry.bitstring)
    assignment = _lift_and_refine(g, screening, coarse_bits, fm_cfg)
    logger.info(
        "Coarse %d-vertex solve lifted to cut %.6g (imbalance %.4f)",
        coarse.n_vertices, assignment.cut, assignment.imbalance,
    )

    candidates = rank_by_merit(g, screening, pool, fm_cfg, rank_candidates) if rank_candidates else []
    return PartitionOutcome(assignment, screening, QUANTUM, pool, candidates)


def rank_by_merit(
    g: WeightedGraph,
    screening: ScreeningResult,
    pool: SolutionPool,
    fm_cfg: FmConfig,
    n_candidates: int,
) -> List[RankedCandidate]:
    """Score the lowest-energy pool entries by single-level dissection fill"""
    pattern = ordering_service.graph_to_pattern(g)
    entries = pool.top(n_candidates)

    def score(entry: PoolEntry) -> RankedCandidate:
        assignment = _lift_and_refine(g, screening, bitstring_to_bits(entry.bitstring), fm_cfg)
        perm, separator_size = ordering_service.one_level_order(g, assignment)
        return RankedCandidate(entry, assignment, separator_size, ordering_service.symbolic_factor(pattern, perm))

    with ThreadPoolExecutor(max_workers=settings.worker_count) as executor:
        scored = list(executor.map(score, entries))
    order = sorted(
        range(len(scored)),
        key=lambda t: (
            not scored[t].assignment.is_feasible(fm_cfg.nu),
            scored[t].stats.fill_in,
            scored[t].stats.op_count,
            t,
        ),
    )
    return [scored[t] for t in order]


def partition_graph(g: WeightedGraph, cfg: RunConfig) -> PartitionOutcome:
    """Full pipeline of the partition command"""
    k = coarse_size(g, cfg.k)
    if k > g.n_vertices:
        raise InputError(f"k={k} exceeds the {g.n_vertices} graph vertices")
    return quantum_partition(
        g,
        cfg.screening_config(k),
        cfg.iteration_config(),
        cfg.fm_config(),
        lam=cfg.lam,
        rank_candidates=cfg.rank_candidates,
    )


class DissectionStrategy:
    """Quantum pipeline at the configured quantum levels, classical screen+FM elsewhere

    Every block draws its coarsening, FM and sampling streams from a seed
    derived from (run seed, level, block number). A quantum level whose
    solve fails or ends infeasible falls back to the classical strategy for
    that block, and the block is then reported as classical.
    """

    def __init__(self, cfg: RunConfig, quantum_levels: Sequence[int]):
        self.cfg = cfg
        self.quantum_levels = set(quantum_levels)
        self.fm_cfg = cfg.fm_config()

    def block_seed(self, level: int, block: int) -> int:
        return rng.child_seed(self.cfg.seed or 0, rng.DISSECTION_BLOCK, level, block)

    def __call__(self, sub: WeightedGraph, level: int, block: int) -> BlockPartition:
        cfg = self.cfg
        seed = self.block_seed(level, block)
        screening_cfg = cfg.screening_config(min(coarse_size(sub, cfg.k), sub.n_vertices))
        screening_cfg = screening_cfg.model_copy(update={"seed": seed})
        if level in self.quantum_levels:
            iteration_cfg = cfg.iteration_config().model_copy(update={"seed": seed})
            try:
                outcome = quantum_partition(sub, screening_cfg, iteration_cfg, self.fm_cfg, lam=cfg.lam)
                if outcome.assignment.is_feasible(cfg.nu):
                    return BlockPartition(outcome.assignment, quantum=True)
                logger.warning(
                    "Level %d block %d quantum partition infeasible; using classical strategy", level, block
                )
            except InputError as e:
                logger.warning(
                    "Level %d block %d quantum partition failed (%s); using classical strategy", level, block, e
                )
        return BlockPartition(classical_partition(sub, screening_cfg, self.fm_cfg).assignment)


def dissect_graph(g: WeightedGraph, cfg: RunConfig, quantum: bool = True) -> DissectionResult:
    """Nested dissection with the configured per-level strategy"""
    if quantum and cfg.quantum_levels:
        qaoa_service.check_qubit_cap(coarse_size(g, cfg.k))
    dissection_cfg = cfg.dissection_config()
    if not quantum:
        dissection_cfg = dissection_cfg.model_copy(update={"quantum_levels": []})
    strategy = DissectionStrategy(cfg, dissection_cfg.quantum_levels)
    return ordering_service.NestedDissector(dissection_cfg, strategy).run(g)
