"""
sweep: expectation landscape over the ramp parameter and circuit depth
"""

import argparse

import numpy as np

from qpart.commands.common import (
    ConfigResolver,
    add_objective_arguments,
    add_run_arguments,
    add_sweep_arguments,
    config_document,
    emit_report,
    require,
    write_text,
)
from qpart.core.cli import CommandRouter
from qpart.core.config import settings
from qpart.models.objective import GppObjective
from qpart.schemas.report import SweepBest, SweepSummary
from qpart.services import graph_service, param_service

router = CommandRouter()


def arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", help="METIS graph file")
    parser.add_argument("--shots", type=int, help="0 for exact expectations")
    add_run_arguments(parser)
    add_objective_arguments(parser)
    add_sweep_arguments(parser)


@router.command("sweep", help="Delta/p expectation landscape (CSV) and per-depth optima", arguments=arguments)
def run_sweep(args: argparse.Namespace) -> None:
    cfg = ConfigResolver("sweep", args, defaults={"shots": 0}).resolve()
    require(cfg, "graph")
    if cfg.deltas is None:
        cfg = cfg.model_copy(update={"deltas": param_service.default_deltas()})

    g = graph_service.normalize_weights(graph_service.read_metis_graph(cfg.graph))
    obj = GppObjective(g, lam=cfg.lam, nu=cfg.nu)
    result = param_service.sweep_delta(obj, cfg.deltas, cfg.depths, shots=cfg.shots, seed=cfg.seed)

    if cfg.out:
        write_text(cfg.out, param_service.sweep_csv(result))
    best = [SweepBest(p=p, delta=d, expectation=e) for p, (d, e) in sorted(result.best.items())]
    emit_report(cfg, SweepSummary(
        version=settings.VERSION,
        config=config_document(cfg),
        n_qubits=obj.n,
        mode=result.mode,
        normalization=result.normalization,
        best=best,
        mean_best_delta=float(np.mean([b.delta for b in best])),
    ))
