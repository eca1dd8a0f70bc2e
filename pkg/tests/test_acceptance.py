"""
Long-running statistical checks; run with `pytest -m acceptance`
"""

import numpy as np
import pytest

from qpart.models.graph import Assignment
from qpart.models.objective import GppObjective
from qpart.models.ordering import Permutation
from qpart.schemas.config import IterationConfig, RunConfig
from qpart.services import graph_service, iterative_service, ordering_service, param_service, pipeline_service

pytestmark = pytest.mark.acceptance

NU = 0.05
SEEDS = range(20)


def _instance(seed: int) -> GppObjective:
    n = 10 + seed % 5
    g = graph_service.normalize_weights(graph_service.random_graph(n, 0.35, seed=seed, weighted=True))
    return GppObjective(g, lam=1.0, nu=NU)


def _best_feasible_cut(obj: GppObjective, pool) -> float:
    for entry in pool.ranked():
        a = Assignment.of(obj.graph, [int(c) for c in reversed(entry.bitstring)])
        if a.is_feasible(NU):
            return a.cut
    return np.inf


@pytest.fixture(scope="module")
def solver_runs():
    runs = []
    for seed in SEEDS:
        obj = _instance(seed)
        delta = param_service.sweep_delta(obj, param_service.default_deltas(), [5]).best[5][0]
        pool = iterative_service.IterativeSolver(obj, IterationConfig(delta=delta, seed=seed)).run()
        runs.append((obj, pool))
    return runs


def test_solver_matches_oracle(solver_runs):
    hits = 0
    for obj, pool in solver_runs:
        optimum = param_service.brute_force_gpp(obj)
        if not optimum.feasible:
            continue
        cut = _best_feasible_cut(obj, pool)
        assert cut <= 1.10 * optimum.assignment.cut + 1e-12
        hits += cut <= optimum.assignment.cut + 1e-9
    assert hits >= 0.8 * len(solver_runs)


def test_sampled_energy_squeezes(solver_runs):
    squeezed = 0
    for _, pool in solver_runs:
        best = [r.best_energy for r in pool.records]
        assert all(b <= a for a, b in zip(best, best[1:]))
        squeezed += pool.records[-1].mean_sampled_energy <= pool.records[0].mean_sampled_energy
    assert squeezed >= 0.95 * len(solver_runs)


def test_grid_dissection_merit():
    g = graph_service.grid_graph(16, 16)
    cfg = RunConfig(command="order", seed=11, k=16, levels=4, quantum_levels=[1])
    classical = pipeline_service.dissect_graph(g, cfg, quantum=False)
    hybrid = pipeline_service.dissect_graph(g, cfg, quantum=True)
    report = ordering_service.merit_report(g, [
        ("identity", Permutation.identity(g.n_vertices)),
        ("nd_classical", classical.permutation),
        ("nd_quantum", hybrid.permutation),
    ], extra_baselines=["nd_classical"])
    rows = {r.ordering_name: r for r in report.rows}
    assert hybrid.quantum_blocks >= 1
    assert rows["nd_quantum"].fill_in < rows["identity"].fill_in
    assert rows["nd_quantum"].ratios["nd_classical"].fill <= 1.5
    assert rows["nd_quantum"].ratio_fill is not None


def test_delta_valley_is_local(pinned_graph):
    obj = GppObjective(graph_service.normalize_weights(pinned_graph))
    deltas = param_service.default_deltas()
    result = param_service.sweep_delta(obj, deltas, [3, 6])
    steps = abs(deltas.index(result.best[3][0]) - deltas.index(result.best[6][0]))
    assert steps <= 4
