"""
partition: coarsen, solve the coarse graph with iterative QAOA, lift and refine
"""

import argparse
import math
from typing import List

from qpart.commands.common import (
    ConfigResolver,
    add_coarsening_arguments,
    add_objective_arguments,
    add_run_arguments,
    add_solver_arguments,
    config_document,
    emit_report,
    require,
    write_lines,
    write_text,
)
from qpart.core.cli import CommandRouter
from qpart.core.config import settings
from qpart.models.coarse import ScreeningResult
from qpart.models.pool import RAW, REFINED, PoolEntry, SolutionPool
from qpart.schemas.report import (
    CandidateRanking,
    CoarseningSummary,
    PartitionReport,
    PoolEntryModel,
    PoolSummary,
)
from qpart.services import graph_service, pipeline_service, qaoa_service

router = CommandRouter()

POOL_SUMMARY_SIZE = 10


def arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", help="METIS graph file")
    parser.add_argument("--log", help="iteration log (JSON lines)")
    parser.add_argument("--rank-candidates", dest="rank_candidates", type=int,
                        help="pool entries scored by dissection merit")
    add_run_arguments(parser)
    add_objective_arguments(parser)
    add_coarsening_arguments(parser)
    add_solver_arguments(parser)


def _finite(value: float):
    return value if math.isfinite(value) else None


def coarsening_summary(screening: ScreeningResult) -> CoarseningSummary:
    return CoarseningSummary(
        k=screening.coarse_map.k,
        d=screening.d,
        round_index=screening.round_index,
        proxy_cost=_finite(screening.proxy_cost),
        feasible=screening.feasible,
        embedding_disconnected=screening.embedding_disconnected,
        rounds=[
            {
                "round_index": r.round_index,
                "proxy_cost": _finite(r.proxy_cost),
                "feasible": r.feasible,
                "imbalance": r.imbalance,
                "best_cut": r.best_cut,
            }
            for r in screening.rounds
        ],
    )


def _entry(e: PoolEntry) -> PoolEntryModel:
    return PoolEntryModel(bitstring=e.bitstring, energy=e.energy, iteration=e.iteration, source=e.source)


def pool_summary(pool: SolutionPool) -> PoolSummary:
    entries = pool.ranked()
    return PoolSummary(
        size=len(entries),
        raw=sum(1 for e in entries if e.source == RAW),
        refined=sum(1 for e in entries if e.source == REFINED),
        best=_entry(entries[0]) if entries else None,
        top=[_entry(e) for e in entries[:POOL_SUMMARY_SIZE]],
    )


def candidate_rows(outcome: pipeline_service.PartitionOutcome, nu: float) -> List[CandidateRanking]:
    return [
        CandidateRanking(
            rank=rank,
            bitstring=c.entry.bitstring,
            coarse_energy=c.entry.energy,
            cut=c.assignment.cut,
            imbalance=c.assignment.imbalance,
            feasible=c.assignment.is_feasible(nu),
            separator_size=c.separator_size,
            fill_in=c.stats.fill_in,
            op_count=c.stats.op_count,
        )
        for rank, c in enumerate(outcome.candidates, start=1)
    ]


@router.command("partition", help="Balanced bipartition via coarsen, iterative QAOA, lift and FM", arguments=arguments)
def run_partition(args: argparse.Namespace) -> None:
    resolver = ConfigResolver("partition", args)
    cfg = resolver.resolve()
    require(cfg, "graph")
    # fail on the qubit cap before reading or coarsening anything
    if cfg.k is not None:
        qaoa_service.check_qubit_cap(cfg.k, settings.STATEVECTOR_QUBIT_CAP)

    g = graph_service.read_metis_graph(cfg.graph)
    k = pipeline_service.coarse_size(g, cfg.k)
    if cfg.preset:
        cfg = resolver.resolve(preset_size=k)
    cfg = cfg.model_copy(update={"k": k})

    outcome = pipeline_service.partition_graph(g, cfg)
    pool = outcome.pool
    records = pool.records if pool is not None else []

    if cfg.out:
        write_text(cfg.out, graph_service.write_partition(outcome.assignment.bits))
    if cfg.log:
        write_lines(cfg.log, records)

    a = outcome.assignment
    emit_report(cfg, PartitionReport(
        version=settings.VERSION,
        config=config_document(cfg),
        n_vertices=g.n_vertices,
        cut=a.cut,
        part_weights=list(a.part_weights),
        imbalance=a.imbalance,
        feasible=a.is_feasible(cfg.nu),
        coarsening=coarsening_summary(outcome.screening),
        pool=pool_summary(pool) if pool is not None else PoolSummary(size=0, raw=0, refined=0),
        iterations=records,
        candidates=candidate_rows(outcome, cfg.nu),
    ))
