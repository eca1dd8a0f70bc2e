"""
Balanced-bipartition QUBO objective
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qpart.core.errors import InputError
from qpart.models.graph import WeightedGraph
from qpart.models.quantum import basis_linear_form


@dataclass(frozen=True, eq=False)
class GppObjective:
    """C(x) = cut(x) + lambda * (sum_i v_i x_i - Omega/2)^2"""

    graph: WeightedGraph
    lam: float = 1.0
    nu: float = 0.05

    def __post_init__(self):
        # lambda = 0 is the pure-cut limit; run configurations require lambda > 0
        if not self.lam >= 0:
            raise InputError(f"lambda must be non-negative, got {self.lam}")
        if not 0 <= self.nu < 0.5:
            raise InputError(f"nu must lie in [0, 0.5), got {self.nu}")

    @property
    def n(self) -> int:
        return self.graph.n_vertices

    def evaluate(self, bits: Sequence[int]) -> float:
        x = np.asarray(bits)
        load = float(np.sum(self.graph.vertex_weights[x == 1]))
        penalty = (load - self.graph.total_vertex_weight / 2.0) ** 2
        return self.graph.cut_weight(x) + self.lam * penalty

    def cut_and_load(self):
        """Cut weight and part-1 weight of every basis state, by doubling"""
        g = self.graph
        adj = g.adjacency.tocsc()
        cut = np.zeros(1, dtype=np.float64)
        load = np.zeros(1, dtype=np.float64)
        for k in range(g.n_vertices):
            lo, hi = adj.indptr[k], adj.indptr[k + 1]
            rows, vals = adj.indices[lo:hi], adj.data[lo:hi]
            prior = np.zeros(k)
            mask = rows < k
            prior[rows[mask]] = vals[mask]
            # weight from vertex k into the already-placed vertices set to 1
            to_ones = basis_linear_form(prior)
            cut = np.concatenate((cut + to_ones, cut + prior.sum() - to_ones))
            load = np.concatenate((load, load + g.vertex_weights[k]))
        return cut, load

    def energies(self) -> np.ndarray:
        """C(x) on every basis state"""
        cut, load = self.cut_and_load()
        return cut + self.lam * (load - self.graph.total_vertex_weight / 2.0) ** 2
