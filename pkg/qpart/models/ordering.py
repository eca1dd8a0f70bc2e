"""
Permutations, sparsity patterns and symbolic factorization figures
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Sequence

import numpy as np
import scipy.sparse as sp

from qpart.core.errors import InputError, PatternError
from qpart.models.graph import Assignment


@dataclass(frozen=True, eq=False)
class Permutation:
    """Bijection old index -> new index"""

    perm: np.ndarray

    def __post_init__(self):
        n = self.perm.shape[0]
        if self.perm.ndim != 1 or not np.array_equal(np.sort(self.perm), np.arange(n)):
            raise InputError("permutation is not a bijection onto 0..n-1")
        self.perm.setflags(write=False)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n, dtype=np.int64))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Permutation":
        """Build from an elimination order (order[t] = old vertex eliminated t-th)"""
        order = np.asarray(order, dtype=np.int64)
        perm = np.empty_like(order)
        perm[order] = np.arange(order.shape[0], dtype=np.int64)
        return cls(perm)

    @property
    def n(self) -> int:
        return int(self.perm.shape[0])

    @cached_property
    def inverse(self) -> np.ndarray:
        """new index -> old index, i.e. the elimination order"""
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.n, dtype=np.int64)
        inv.setflags(write=False)
        return inv


@dataclass(frozen=True, eq=False)
class SparsityPattern:
    """Symmetric pattern with a full diagonal, held as boolean CSR"""

    matrix: sp.csr_matrix

    def __post_init__(self):
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise PatternError("pattern must be square")
        if (m != m.T).nnz:
            raise PatternError("pattern is not symmetric")
        if not np.all(m.diagonal()):
            missing = int(np.flatnonzero(~m.diagonal().astype(bool))[0])
            raise PatternError(f"diagonal entry {missing} is missing")

    @classmethod
    def from_matrix(cls, matrix) -> "SparsityPattern":
        m = sp.csr_matrix(matrix, dtype=bool)
        m.eliminate_zeros()
        m.sort_indices()
        return cls(m)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    @property
    def nnz_below(self) -> int:
        """Strictly lower-triangular entries"""
        return (self.nnz - self.n) // 2

    def permuted(self, p: Permutation) -> "SparsityPattern":
        """P A P^T with old index i moved to p.perm[i]"""
        inv = p.inverse
        return SparsityPattern(self.matrix[inv][:, inv].tocsr())


@dataclass(frozen=True)
class FactorStats:
    """Symbolic Cholesky figures of a permuted pattern"""

    nnz_factor: int
    fill_in: int
    op_count: float


@dataclass(frozen=True, eq=False)
class BlockPartition:
    """Bipartition of one dissection block and whether QAOA produced it"""

    assignment: Assignment
    quantum: bool = False


@dataclass(frozen=True, eq=False)
class DissectionResult:
    """Nested dissection permutation with per-block separator sizes in visiting order"""

    permutation: Permutation
    separator_sizes: List[int] = field(default_factory=list)
    fallback_blocks: int = 0
    quantum_blocks: int = 0
