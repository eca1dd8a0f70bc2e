"""
Nested dissection, vertex separators and symbolic factorization
"""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.io
import scipy.sparse as sp
from scipy.sparse import csgraph

from qpart.core.errors import InputError, PatternError
from qpart.models.graph import Assignment, WeightedGraph
from qpart.models.ordering import BlockPartition, DissectionResult, FactorStats, Permutation, SparsityPattern
from qpart.schemas.config import DissectionConfig
from qpart.schemas.report import MeritRatio, MeritReport, MeritRow
from qpart.services import graph_service

logger = logging.getLogger(__name__)

# (subgraph, 1-based level, block number within the level) -> bipartition of the subgraph
PartitionStrategy = Callable[[WeightedGraph, int, int], BlockPartition]


def graph_to_pattern(g: WeightedGraph) -> SparsityPattern:
    """Adjacency plus a full diagonal"""
    adj = graph_service.adjacency_pattern(g)
    return SparsityPattern.from_matrix(adj + sp.identity(g.n_vertices, format="csr"))


def pattern_to_graph(pattern: SparsityPattern) -> WeightedGraph:
    """Unit-weight adjacency graph of the off-diagonal pattern"""
    lower = sp.tril(pattern.matrix, k=-1).tocoo()
    edges = [(int(j), int(i), 1.0) for i, j in zip(lower.row, lower.col)]
    return WeightedGraph.from_edges(pattern.n, edges)


def read_matrix_market(path: Union[str, Path]) -> SparsityPattern:
    """Read the nonzero structure of a Matrix Market coordinate file"""
    try:
        matrix = scipy.io.mmread(str(path))
    except (OSError, ValueError) as e:
        raise PatternError(f"cannot read Matrix Market file {path}: {e}")
    matrix = sp.csr_matrix(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        raise PatternError(f"{path}: matrix is {matrix.shape[0]}x{matrix.shape[1]}, not square")
    # explicit zeros still belong to the structure
    structure = sp.csr_matrix(
        (np.ones(matrix.nnz, dtype=bool), matrix.indices, matrix.indptr), shape=matrix.shape
    )
    return SparsityPattern.from_matrix(structure)


def read_permutation(path: Union[str, Path], n: Optional[int] = None) -> Permutation:
    """One integer per line, line i = new index of old vertex i"""
    try:
        lines = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]
    except OSError as e:
        raise InputError(f"cannot read permutation file {path}: {e}")
    try:
        perm = np.array([int(line) for line in lines], dtype=np.int64)
    except ValueError as e:
        raise InputError(f"{path}: {e}")
    if n is not None and perm.shape[0] != n:
        raise InputError(f"{path}: expected {n} entries, found {perm.shape[0]}")
    return Permutation(perm)


def write_permutation(p: Permutation) -> str:
    return "".join(f"{int(v)}\n" for v in p.perm)


def elimination_tree(pattern: SparsityPattern) -> np.ndarray:
    """Parent of each column in the elimination tree (-1 at roots)"""
    n = pattern.n
    m = pattern.matrix
    parent = np.full(n, -1, dtype=np.int64)
    ancestor = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        for k in m.indices[m.indptr[i]:m.indptr[i + 1]]:
            k = int(k)
            # path compression toward the current root
            while k != -1 and k < i:
                nxt = int(ancestor[k])
                ancestor[k] = i
                if nxt == -1:
                    parent[k] = i
                k = nxt
    return parent


def column_counts(pattern: SparsityPattern, parent: np.ndarray) -> np.ndarray:
    """Below-diagonal nonzeros per column of L via row subtrees"""
    n = pattern.n
    m = pattern.matrix
    counts = np.zeros(n, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        mark[i] = i
        for k in m.indices[m.indptr[i]:m.indptr[i + 1]]:
            j = int(k)
            while j < i and mark[j] != i:
                counts[j] += 1
                mark[j] = i
                j = int(parent[j])
    return counts


def symbolic_factor(pattern: SparsityPattern, p: Permutation) -> FactorStats:
    """Exact Cholesky structure figures of P A P^T"""
    if p.n != pattern.n:
        raise InputError(f"permutation has {p.n} entries, pattern has {pattern.n} rows")
    permuted = pattern.permuted(p)
    counts = column_counts(permuted, elimination_tree(permuted))
    nnz_factor = int(counts.sum())
    ops = int(np.sum(counts * (counts + 3) // 2))
    return FactorStats(nnz_factor, nnz_factor - permuted.nnz_below, float(ops))


def extract_separator(g: WeightedGraph, x: Assignment) -> np.ndarray:
    """Greedy vertex cover of the cut edges, returned sorted"""
    bits = x.bits
    if bits.shape != (g.n_vertices,):
        raise InputError("assignment does not match the graph")
    e = g.edge_index
    cut = e[bits[e[:, 0]] != bits[e[:, 1]]] if g.n_edges else np.zeros((0, 2), dtype=np.int64)
    uncovered = np.ones(cut.shape[0], dtype=bool)
    separator: List[int] = []
    while uncovered.any():
        counts = np.bincount(cut[uncovered].ravel(), minlength=g.n_vertices)
        candidates = np.flatnonzero(counts == counts.max())
        # most uncovered edges, then lighter, then lower index
        v = int(candidates[np.lexsort((candidates, g.vertex_weights[candidates]))[0]])
        separator.append(v)
        uncovered &= (cut[:, 0] != v) & (cut[:, 1] != v)
    return np.array(sorted(separator), dtype=np.int64)


def pseudo_peripheral_vertex(pattern: sp.csr_matrix, start: int) -> int:
    """Walk to a farthest vertex until the eccentricity stops growing"""
    degrees = np.diff(pattern.indptr)
    v, eccentricity = start, -1.0
    while True:
        dist = csgraph.shortest_path(pattern, directed=False, unweighted=True, indices=v)
        far = dist[np.isfinite(dist)].max()
        if far <= eccentricity:
            return v
        eccentricity = far
        candidates = np.flatnonzero(dist == far)
        v = int(candidates[np.lexsort((candidates, degrees[candidates]))[0]])


def fallback_order(g: WeightedGraph) -> np.ndarray:
    """Reversed breadth-first order from a pseudo-peripheral vertex, component by component"""
    if g.n_vertices == 0:
        return np.zeros(0, dtype=np.int64)
    pattern = graph_service.adjacency_pattern(g)
    labels = graph_service.connected_components(g)
    order = []
    for c in range(int(labels.max()) + 1):
        members = np.flatnonzero(labels == c)
        if members.shape[0] == 1:
            order.append(members)
            continue
        start = pseudo_peripheral_vertex(pattern, int(members[0]))
        bfs = csgraph.breadth_first_order(pattern, start, directed=False, return_predecessors=False)
        order.append(np.asarray(bfs, dtype=np.int64)[::-1])
    return np.concatenate(order)


def split_blocks(g: WeightedGraph, x: Assignment) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Part-0 remainder, part-1 remainder and separator (local indices)"""
    separator = extract_separator(g, x)
    rest = np.ones(g.n_vertices, dtype=bool)
    rest[separator] = False
    left = np.flatnonzero(rest & (x.bits == 0))
    right = np.flatnonzero(rest & (x.bits == 1))
    return left, right, separator


def one_level_order(g: WeightedGraph, x: Assignment) -> Tuple[Permutation, int]:
    """Single dissection step: both remainders by fallback order, separator last"""
    left, right, separator = split_blocks(g, x)
    parts = []
    for block in (left, right):
        if block.shape[0]:
            sub = graph_service.subgraph_by_index(g, block)
            parts.append(block[fallback_order(sub)])
    parts.append(separator)
    return Permutation.from_order(np.concatenate(parts)), int(separator.shape[0])


class NestedDissector:
    """Recursive bisection with separators numbered after both of their subtrees

    Blocks are numbered per level in visiting order; the strategy receives
    (subgraph, 1-based level, block number) so it can derive block streams.
    """

    def __init__(self, cfg: DissectionConfig, strategy: PartitionStrategy):
        self.cfg = cfg
        self.strategy = strategy
        self.separator_sizes: List[int] = []
        self.fallback_blocks = 0
        self.quantum_blocks = 0
        self._blocks_at: Dict[int, int] = defaultdict(int)

    def run(self, g: WeightedGraph) -> DissectionResult:
        self.separator_sizes = []
        self.fallback_blocks = 0
        self.quantum_blocks = 0
        self._blocks_at = defaultdict(int)
        order = self._dissect(g, np.arange(g.n_vertices, dtype=np.int64), 1)
        logger.info(
            "Nested dissection: %d separators (largest %d), %d fallback blocks, %d quantum blocks",
            len(self.separator_sizes), max(self.separator_sizes, default=0),
            self.fallback_blocks, self.quantum_blocks,
        )
        return DissectionResult(
            Permutation.from_order(order), list(self.separator_sizes), self.fallback_blocks, self.quantum_blocks
        )

    def _dissect(self, g: WeightedGraph, vertices: np.ndarray, level: int) -> np.ndarray:
        cfg = self.cfg
        sub = graph_service.subgraph_by_index(g, vertices)
        if level > cfg.levels or vertices.shape[0] < max(cfg.min_block_size, 2) or sub.n_edges == 0:
            self.fallback_blocks += 1
            return vertices[fallback_order(sub)]
        block = self._blocks_at[level]
        self._blocks_at[level] += 1
        solved = self.strategy(sub, level, block)
        if solved.quantum:
            self.quantum_blocks += 1
        left, right, separator = split_blocks(sub, solved.assignment)
        self.separator_sizes.append(int(separator.shape[0]))
        logger.debug(
            "Level %d block %d of %d vertices: parts %d/%d, separator %d",
            level, block, vertices.shape[0], left.shape[0], right.shape[0], separator.shape[0],
        )
        parts = [self._dissect(g, vertices[b], level + 1) for b in (left, right) if b.shape[0]]
        parts.append(vertices[separator])
        return np.concatenate(parts)


def nested_dissection(
    g: WeightedGraph,
    levels: int,
    strategy: PartitionStrategy,
    cfg: Optional[DissectionConfig] = None,
) -> DissectionResult:
    if levels < 1:
        raise InputError("nested dissection needs at least one level")
    cfg = (cfg or DissectionConfig(levels=levels)).model_copy(update={"levels": levels})
    return NestedDissector(cfg, strategy).run(g)


def _ratio(value: float, base: float) -> Optional[float]:
    if base == 0:
        return 1.0 if value == 0 else None
    return value / base


def merit_report(
    g: Union[WeightedGraph, SparsityPattern],
    orderings: Sequence[Tuple[str, Permutation]],
    baseline: Optional[str] = None,
    extra_baselines: Sequence[str] = (),
) -> MeritReport:
    """FactorStats per named ordering, with ratios against the baseline and every extra baseline"""
    pattern = g if isinstance(g, SparsityPattern) else graph_to_pattern(g)
    names = [name for name, _ in orderings]
    if not names:
        raise InputError("merit report needs at least one ordering")
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise InputError(f"duplicate ordering names: {', '.join(duplicates)}")
    baseline = baseline or names[0]
    baselines = [baseline] + [b for b in dict.fromkeys(extra_baselines) if b != baseline]
    for name in baselines:
        if name not in names:
            raise InputError(f"baseline ordering '{name}' is not among {names}")

    stats = {name: symbolic_factor(pattern, p) for name, p in orderings}
    base = stats[baseline]
    rows = [
        MeritRow(
            ordering_name=name,
            nnz_factor=s.nnz_factor,
            fill_in=s.fill_in,
            op_count=s.op_count,
            ratio_fill=_ratio(s.fill_in, base.fill_in),
            ratio_ops=_ratio(s.op_count, base.op_count),
            baseline=baseline,
            ratios={
                b: MeritRatio(fill=_ratio(s.fill_in, stats[b].fill_in), ops=_ratio(s.op_count, stats[b].op_count))
                for b in baselines
            },
        )
        for name, s in stats.items()
    ]
    return MeritReport(baseline=baseline, baselines=baselines, nnz_pattern=pattern.nnz, rows=rows)
