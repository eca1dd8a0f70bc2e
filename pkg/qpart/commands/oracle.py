"""
oracle: exhaustive balanced bipartition or naive elimination on small inputs
"""

import argparse

from qpart.commands.common import (
    ConfigResolver,
    add_objective_arguments,
    add_run_arguments,
    config_document,
    emit_report,
    write_text,
)
from qpart.core.cli import CommandRouter
from qpart.core.config import settings
from qpart.core.errors import InputError
from qpart.models.objective import GppObjective
from qpart.models.ordering import Permutation
from qpart.schemas.report import EliminationOracleReport, GppOracleReport
from qpart.services import graph_service, ordering_service, param_service

router = CommandRouter()


def arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--graph", help="METIS graph file (balanced bipartition oracle)")
    source.add_argument("--matrix", help="Matrix Market file (elimination oracle)")
    parser.add_argument("--perm", help="permutation file for --matrix (identity when omitted)")
    add_run_arguments(parser)
    add_objective_arguments(parser)


@router.command("oracle", help="Brute-force reference results for small instances", arguments=arguments)
def run_oracle(args: argparse.Namespace) -> None:
    cfg = ConfigResolver("oracle", args).resolve()
    if (cfg.graph is None) == (cfg.matrix is None):
        raise InputError("oracle needs exactly one of --graph or --matrix")

    if cfg.matrix:
        pattern = ordering_service.read_matrix_market(cfg.matrix)
        perm = (
            ordering_service.read_permutation(cfg.perm, pattern.n)
            if cfg.perm
            else Permutation.identity(pattern.n)
        )
        stats = param_service.brute_force_eliminate(pattern, perm)
        emit_report(cfg, EliminationOracleReport(
            version=settings.VERSION,
            config=config_document(cfg),
            n=pattern.n,
            nnz_factor=stats.nnz_factor,
            fill_in=stats.fill_in,
            op_count=stats.op_count,
        ))
        return

    g = graph_service.read_metis_graph(cfg.graph)
    optimum = param_service.brute_force_gpp(GppObjective(g, lam=cfg.lam, nu=cfg.nu))
    a = optimum.assignment
    if cfg.out and a is not None:
        write_text(cfg.out, graph_service.write_partition(a.bits))
    emit_report(cfg, GppOracleReport(
        version=settings.VERSION,
        config=config_document(cfg),
        n_vertices=g.n_vertices,
        feasible=optimum.feasible,
        bitstring=a.bitstring if a is not None else None,
        cut=a.cut if a is not None else None,
        part_weights=list(a.part_weights) if a is not None else None,
        qubo_min_bitstring=optimum.qubo_min_bitstring,
        qubo_min_energy=optimum.qubo_min_energy,
    ))
