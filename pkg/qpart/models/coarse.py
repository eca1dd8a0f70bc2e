"""
Spectral embedding, coarse map and screening results
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from qpart.core.errors import InputError
from qpart.models.graph import WeightedGraph


@dataclass(frozen=True, eq=False)
class SpectralEmbedding:
    """n x d coordinates from the smallest nontrivial Laplacian modes"""

    coords: np.ndarray
    eigenvalues: np.ndarray
    n_components: int = 1

    @property
    def d(self) -> int:
        return int(self.coords.shape[1])

    @property
    def disconnected(self) -> bool:
        return self.n_components > 1


@dataclass(frozen=True, eq=False)
class CoarseMap:
    """Cluster label per fine vertex (0-based) and the contracted graph"""

    sigma: np.ndarray
    coarse: WeightedGraph

    def __post_init__(self):
        k = self.coarse.n_vertices
        if self.sigma.ndim != 1:
            raise InputError("cluster labels must be a vector")
        if self.sigma.size and (self.sigma.min() < 0 or self.sigma.max() >= k):
            raise InputError("cluster label out of range")

    @property
    def k(self) -> int:
        return self.coarse.n_vertices

    def dump(self) -> str:
        """Text lines `vertex cluster`, both 1-based"""
        return "".join(f"{v + 1} {int(c) + 1}\n" for v, c in enumerate(self.sigma))


@dataclass(frozen=True)
class ScreeningRound:
    """Outcome of one k-means + trial-refinement round"""

    round_index: int
    proxy_cost: float  # inf when no trial was feasible
    feasible: bool
    imbalance: float
    best_cut: float


@dataclass(frozen=True, eq=False)
class ScreeningResult:
    """Winning round of spectral coarsening with screening"""

    coarse_map: CoarseMap
    proxy_cost: float
    feasible: bool
    round_index: int
    best_bits: np.ndarray  # best refined coarse bipartition of the winner
    embedding_disconnected: bool = False
    rounds: List[ScreeningRound] = field(default_factory=list)
    d: Optional[int] = None
