"""
order: nested dissection ordering and symbolic-factorization merit figures
"""

import argparse

from qpart.commands.common import (
    ConfigResolver,
    add_coarsening_arguments,
    add_objective_arguments,
    add_run_arguments,
    add_solver_arguments,
    config_document,
    emit_report,
    write_text,
)
from qpart.core.cli import CommandRouter
from qpart.core.config import settings
from qpart.core.errors import InputError
from qpart.models.ordering import Permutation
from qpart.schemas.report import OrderReport
from qpart.services import graph_service, ordering_service, pipeline_service

router = CommandRouter()

IDENTITY = "identity"
CLASSICAL = "nd_classical"
QUANTUM = "nd_quantum"


def arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--graph", help="METIS graph file")
    source.add_argument("--matrix", help="Matrix Market file (structure only)")
    parser.add_argument("--levels", type=int, help="dissection levels")
    parser.add_argument("--quantum-levels", dest="quantum_levels", type=int, nargs="*",
                        help="levels solved with iterative QAOA (none: classical only)")
    parser.add_argument("--min-block-size", dest="min_block_size", type=int)
    add_run_arguments(parser)
    add_objective_arguments(parser)
    add_coarsening_arguments(parser)
    add_solver_arguments(parser)


@router.command("order", help="Nested dissection ordering with merit report", arguments=arguments)
def run_order(args: argparse.Namespace) -> None:
    resolver = ConfigResolver("order", args)
    cfg = resolver.resolve()
    if (cfg.graph is None) == (cfg.matrix is None):
        raise InputError("order needs exactly one of --graph or --matrix")

    if cfg.graph:
        g = graph_service.read_metis_graph(cfg.graph)
        pattern = ordering_service.graph_to_pattern(g)
    else:
        pattern = ordering_service.read_matrix_market(cfg.matrix)
        g = ordering_service.pattern_to_graph(pattern)
    if cfg.preset:
        cfg = resolver.resolve(preset_size=pipeline_service.coarse_size(g, cfg.k))

    orderings = [(IDENTITY, Permutation.identity(g.n_vertices))]
    separators = {}
    classical = pipeline_service.dissect_graph(g, cfg, quantum=False)
    orderings.append((CLASSICAL, classical.permutation))
    separators[CLASSICAL] = classical.separator_sizes
    primary = classical.permutation
    if cfg.quantum_levels:
        hybrid = pipeline_service.dissect_graph(g, cfg, quantum=True)
        orderings.append((QUANTUM, hybrid.permutation))
        separators[QUANTUM] = hybrid.separator_sizes
        primary = hybrid.permutation

    if cfg.out:
        write_text(cfg.out, ordering_service.write_permutation(primary))
    emit_report(cfg, OrderReport(
        version=settings.VERSION,
        config=config_document(cfg),
        n_vertices=g.n_vertices,
        merit=ordering_service.merit_report(pattern, orderings, baseline=IDENTITY, extra_baselines=[CLASSICAL]),
        separator_sizes=separators,
    ))
