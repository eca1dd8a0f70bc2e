"""
coarsen: spectral coarsening with screening as a standalone benchmark
"""

import argparse

from qpart.commands.common import (
    ConfigResolver,
    add_coarsening_arguments,
    add_objective_arguments,
    add_run_arguments,
    config_document,
    emit_report,
    require,
    write_text,
)
from qpart.commands.partition import coarsening_summary
from qpart.core.cli import CommandRouter
from qpart.core.config import settings
from qpart.schemas.report import CoarsenReport
from qpart.services import coarsen_service, graph_service

router = CommandRouter()

# benchmark mode screens many more random starts than the pipeline default
BENCHMARK_TRIALS = 1000


def arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", help="METIS graph file")
    parser.add_argument("--coarse-map", dest="coarse_map", help="vertex -> cluster map output")
    add_run_arguments(parser)
    add_objective_arguments(parser)
    add_coarsening_arguments(parser)


@router.command("coarsen", help="Screened spectral coarsening; writes the coarse graph", arguments=arguments)
def run_coarsen(args: argparse.Namespace) -> None:
    cfg = ConfigResolver("coarsen", args, defaults={"n_trials": BENCHMARK_TRIALS}).resolve()
    require(cfg, "graph", "k")

    g = graph_service.read_metis_graph(cfg.graph)
    screening = coarsen_service.screen_coarsenings(g, cfg.screening_config())
    cm = screening.coarse_map

    if cfg.out:
        write_text(cfg.out, graph_service.write_metis_graph(cm.coarse))
    if cfg.coarse_map:
        write_text(cfg.coarse_map, cm.dump())
    emit_report(cfg, CoarsenReport(
        version=settings.VERSION,
        config=config_document(cfg),
        n_vertices=g.n_vertices,
        coarsening=coarsening_summary(screening),
    ))
