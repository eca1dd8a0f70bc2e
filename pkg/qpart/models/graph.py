"""
Weighted graph and bipartition assignment
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from qpart.core.errors import InputError

Edge = Tuple[int, int, float]


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph with non-negative vertex and edge weights

    Edges are stored once as sorted (i, j) pairs with i < j. The symmetric
    CSR adjacency is built on first use.
    """

    n_vertices: int
    vertex_weights: np.ndarray
    edge_index: np.ndarray  # (m, 2) int64, rows sorted, i < j
    edge_weights: np.ndarray  # (m,) float64

    def __post_init__(self):
        n = self.n_vertices
        if n < 0:
            raise InputError("vertex count must be non-negative")
        if self.vertex_weights.shape != (n,):
            raise InputError(f"expected {n} vertex weights, got {self.vertex_weights.shape[0]}")
        if self.edge_index.ndim != 2 or self.edge_index.shape[1] != 2:
            raise InputError("edge index must have shape (m, 2)")
        if self.edge_index.shape[0] != self.edge_weights.shape[0]:
            raise InputError("edge index and edge weights differ in length")
        if not np.all(np.isfinite(self.vertex_weights)) or np.any(self.vertex_weights < 0):
            raise InputError("vertex weights must be finite and non-negative")
        if not np.all(np.isfinite(self.edge_weights)) or np.any(self.edge_weights < 0):
            raise InputError("edge weights must be finite and non-negative")
        if self.n_edges:
            i, j = self.edge_index[:, 0], self.edge_index[:, 1]
            if np.any(i < 0) or np.any(j >= n):
                raise InputError("vertex index out of range")
            if np.any(i == j):
                raise InputError(f"self-loop on vertex {int(i[i == j][0])}")
            if np.any(i > j):
                raise InputError("edges must be stored with i < j")
            keys = i * max(n, 1) + j
            if np.any(np.diff(keys) <= 0):
                dup = np.flatnonzero(np.diff(keys) == 0)
                if dup.size:
                    a, b = self.edge_index[dup[0]]
                    raise InputError(f"duplicate edge ({int(a)}, {int(b)})")
                raise InputError("edges must be sorted")
        self.vertex_weights.setflags(write=False)
        self.edge_index.setflags(write=False)
        self.edge_weights.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        n_vertices: int,
        edges: Iterable[Sequence[float]],
        vertex_weights: Optional[Sequence[float]] = None,
    ) -> "WeightedGraph":
        """Build a graph from (i, j[, w]) tuples in any orientation and order"""
        rows: List[Tuple[int, int]] = []
        weights: List[float] = []
        for edge in edges:
            a, b = int(edge[0]), int(edge[1])
            w = float(edge[2]) if len(edge) > 2 else 1.0
            rows.append((min(a, b), max(a, b)))
            weights.append(w)

        if rows:
            index = np.asarray(rows, dtype=np.int64)
            w_arr = np.asarray(weights, dtype=np.float64)
            order = np.lexsort((index[:, 1], index[:, 0]))
            index, w_arr = index[order], w_arr[order]
        else:
            index = np.zeros((0, 2), dtype=np.int64)
            w_arr = np.zeros(0, dtype=np.float64)

        if vertex_weights is None:
            v = np.ones(n_vertices, dtype=np.float64)
        else:
            v = np.asarray(vertex_weights, dtype=np.float64).copy()
        return cls(n_vertices, v, index, w_arr)

    @property
    def n_edges(self) -> int:
        return int(self.edge_index.shape[0])

    @property
    def edges(self) -> List[Edge]:
        return [
            (int(i), int(j), float(w))
            for (i, j), w in zip(self.edge_index, self.edge_weights)
        ]

    @cached_property
    def total_vertex_weight(self) -> float:
        return float(np.sum(self.vertex_weights))

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric weighted adjacency in CSR form"""
        n = self.n_vertices
        i, j = self.edge_index[:, 0], self.edge_index[:, 1]
        w = self.edge_weights
        mat = sp.coo_matrix(
            (np.concatenate((w, w)), (np.concatenate((i, j)), np.concatenate((j, i)))),
            shape=(n, n),
        ).tocsr()
        mat.sort_indices()
        return mat

    @cached_property
    def weighted_degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def neighbors(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and edge weights of vertex v"""
        adj = self.adjacency
        lo, hi = adj.indptr[v], adj.indptr[v + 1]
        return adj.indices[lo:hi], adj.data[lo:hi]

    def cut_weight(self, bits: np.ndarray) -> float:
        """Total weight of edges whose endpoints lie in different parts"""
        if not self.n_edges:
            return 0.0
        crossing = bits[self.edge_index[:, 0]] != bits[self.edge_index[:, 1]]
        return float(np.sum(self.edge_weights[crossing]))

    def part_weights(self, bits: np.ndarray) -> Tuple[float, float]:
        """Vertex weight of part 0 and part 1"""
        w1 = float(np.sum(self.vertex_weights[bits == 1]))
        return self.total_vertex_weight - w1, w1


@dataclass(frozen=True, eq=False)
class Assignment:
    """Binary vertex assignment with its cut and balance figures"""

    bits: np.ndarray
    cut: float
    part_weights: Tuple[float, float]
    total_weight: float = field(repr=False)

    @classmethod
    def of(cls, g: WeightedGraph, bits: Sequence[int]) -> "Assignment":
        """Evaluate `bits` on `g`"""
        arr = np.asarray(bits, dtype=np.int8).copy()
        if arr.shape != (g.n_vertices,):
            raise InputError(
                f"assignment has {arr.shape[0] if arr.ndim else 0} entries, graph has {g.n_vertices} vertices"
            )
        if np.any((arr != 0) & (arr != 1)):
            raise InputError("assignment entries must be 0 or 1")
        arr.setflags(write=False)
        return cls(arr, g.cut_weight(arr), g.part_weights(arr), g.total_vertex_weight)

    @property
    def imbalance(self) -> float:
        """max(part weight) / Ω - 1/2"""
        if self.total_weight <= 0:
            return 0.0
        return max(self.part_weights) / self.total_weight - 0.5

    def is_feasible(self, nu: float) -> bool:
        """Whether max part weight is within (1/2 + ν)Ω"""
        return balance_ok(max(self.part_weights), self.total_weight, nu)

    @property
    def bitstring(self) -> str:
        """Most-significant-first rendering (vertex 0 is the last character)"""
        return "".join(str(int(b)) for b in self.bits[::-1])


def balance_ok(heavier: float, total: float, nu: float) -> bool:
    """Weighted-balance test with a relative tolerance of 1e-12"""
    return heavier <= (0.5 + nu) * total + 1e-12 * max(total, 1.0)
