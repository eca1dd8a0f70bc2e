"""
QUBO objective evaluation and Ising encoding
"""

import logging
from typing import Sequence

import numpy as np

from qpart.core.errors import InputError
from qpart.models.graph import WeightedGraph
from qpart.models.hamiltonian import IsingHamiltonian
from qpart.models.objective import GppObjective

logger = logging.getLogger(__name__)


def _bits(g: WeightedGraph, x: Sequence[int]) -> np.ndarray:
    arr = np.asarray(x)
    if arr.shape != (g.n_vertices,):
        raise InputError(
            f"assignment length {arr.shape[0] if arr.ndim else 0} does not match {g.n_vertices} vertices"
        )
    return arr


def cut_cost(g: WeightedGraph, x: Sequence[int]) -> float:
    """Sum of w_ij over edges with x_i != x_j"""
    return g.cut_weight(_bits(g, x))


def balance_penalty(g: WeightedGraph, x: Sequence[int]) -> float:
    """(sum_i v_i x_i - Omega/2)^2"""
    _, load = g.part_weights(_bits(g, x))
    return (load - g.total_vertex_weight / 2.0) ** 2


def qubo_objective(obj: GppObjective, x: Sequence[int]) -> float:
    """cut_cost + lambda * balance_penalty"""
    return cut_cost(obj.graph, x) + obj.lam * balance_penalty(obj.graph, x)


def to_ising(obj: GppObjective) -> IsingHamiltonian:
    """Substitute x_j = (1 - z_j) / 2 into C(x)"""
    g = obj.graph
    n = g.n_vertices
    v = g.vertex_weights

    # crossing indicator [x_i != x_j] = (1 - z_i z_j) / 2
    constant = float(np.sum(g.edge_weights)) / 2.0
    couplings = np.zeros((n, n))
    if g.n_edges:
        np.add.at(couplings, (g.edge_index[:, 0], g.edge_index[:, 1]), -g.edge_weights / 2.0)

    # sum_i v_i x_i - Omega/2 = -(1/2) sum_i v_i z_i, squared
    constant += obj.lam * float(np.sum(v * v)) / 4.0
    upper = np.triu_indices(n, k=1)
    couplings[upper] += obj.lam * np.outer(v, v)[upper] / 2.0

    keep = couplings[upper] != 0.0
    index = np.stack((upper[0][keep], upper[1][keep]), axis=1).astype(np.int64)
    h = IsingHamiltonian(
        n_qubits=n,
        constant=constant,
        linear=np.zeros(n),
        quad_index=index,
        quad_coeffs=couplings[upper][keep],
    )
    logger.debug("Encoded %d qubits into %d terms", n, index.shape[0])
    return h


def truncate_terms(h: IsingHamiltonian, c_factor: int) -> IsingHamiltonian:
    """Keep the c_factor * n_qubits terms of largest |coefficient|"""
    if c_factor < 1:
        raise InputError("c_factor must be at least 1")
    terms = h.terms()
    cap = c_factor * h.n_qubits
    if len(terms) <= cap:
        return h
    ranked = sorted(terms, key=lambda t: (-abs(t[2]), t[0], t[1]))
    kept = ranked[:cap]
    logger.debug("Truncated %d terms to %d", len(terms), cap)
    return IsingHamiltonian.from_terms(h.n_qubits, h.constant, kept)


def dropped_weight(full: IsingHamiltonian, truncated: IsingHamiltonian) -> float:
    """Sum of |coefficient| over terms present in `full` but not in `truncated`"""
    kept = {(i, j) for i, j, _ in truncated.terms()}
    return float(sum(abs(c) for i, j, c in full.terms() if (i, j) not in kept))
