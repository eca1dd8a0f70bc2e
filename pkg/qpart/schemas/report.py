"""
Schemas for emitted JSON documents
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel


class HistogramBin(BaseModel):
    """Shot counts of raw and refined samples in one energy bin"""
    lower: float
    upper: float
    raw: int = 0
    refined: int = 0


class IterationRecord(BaseModel):
    """One line of the iterative solver run log"""
    iteration: int
    beta_t: float
    best_energy: float
    pool_size: int
    mean_sampled_energy: float
    mean_refined_energy: Optional[float] = None
    distinct_sampled: int
    ranking_scope: str = "pool+current"  # top-k drawn from current candidates merged with the pool
    top_k_changed: bool = True
    histogram: List[HistogramBin] = []


class PoolEntryModel(BaseModel):
    """Serialized pool entry"""
    bitstring: str
    energy: float
    iteration: int
    source: str  # raw or refined


class PoolSummary(BaseModel):
    """Pool size, provenance counts and the lowest-energy entries"""
    size: int
    raw: int
    refined: int
    best: Optional[PoolEntryModel] = None
    top: List[PoolEntryModel] = []


class MeritRatio(BaseModel):
    """Fill and operation ratios against one baseline ordering"""
    fill: Optional[float] = None
    ops: Optional[float] = None


class MeritRow(BaseModel):
    """Symbolic factorization figures of one ordering"""
    ordering_name: str
    nnz_factor: int
    fill_in: int
    op_count: float
    ratio_fill: Optional[float] = None  # None when the baseline has no fill and this one does
    ratio_ops: Optional[float] = None
    baseline: str
    ratios: Dict[str, MeritRatio] = {}  # keyed by baseline name, primary baseline included


class MeritReport(BaseModel):
    """Merit figures of several orderings against a named baseline"""
    baseline: str
    baselines: List[str] = []
    op_count_formula: str = "sum_j c_j (c_j + 3) / 2, c_j = below-diagonal count of column j of L"
    nnz_pattern: int
    rows: List[MeritRow]


class CandidateRanking(BaseModel):
    """A lifted and refined pool candidate scored by one-level dissection merit"""
    rank: int
    bitstring: str
    coarse_energy: float
    cut: float
    imbalance: float
    feasible: bool
    separator_size: int
    fill_in: int
    op_count: float


class CoarseningSummary(BaseModel):
    """Screening outcome"""
    k: int
    d: Optional[int] = None
    round_index: int
    proxy_cost: Optional[float] = None  # None when no round produced a feasible cut
    feasible: bool
    embedding_disconnected: bool = False
    rounds: List[Dict[str, Any]] = []


class PartitionReport(BaseModel):
    """Report of the partition command"""
    version: str
    config: Dict[str, Any]
    n_vertices: int
    cut: float
    part_weights: List[float]
    imbalance: float
    feasible: bool
    coarsening: Optional[CoarseningSummary] = None
    pool: PoolSummary
    iterations: List[IterationRecord]
    candidates: List[CandidateRanking] = []


class OrderReport(BaseModel):
    """Report of the order command"""
    version: str
    config: Dict[str, Any]
    n_vertices: int
    merit: MeritReport
    separator_sizes: Dict[str, List[int]] = {}


class SweepBest(BaseModel):
    """Minimizing ramp parameter for one depth"""
    p: int
    delta: float
    expectation: float


class SweepSummary(BaseModel):
    """Report of the sweep command"""
    version: str
    config: Dict[str, Any]
    n_qubits: int
    mode: str  # exact or shots
    normalization: float
    best: List[SweepBest]
    mean_best_delta: float


class GppOracleReport(BaseModel):
    """Exhaustive balanced bipartition optimum"""
    version: str
    config: Dict[str, Any]
    n_vertices: int
    feasible: bool
    bitstring: Optional[str] = None
    cut: Optional[float] = None
    part_weights: Optional[List[float]] = None
    qubo_min_bitstring: str
    qubo_min_energy: float


class EliminationOracleReport(BaseModel):
    """Naive elimination figures of a permuted pattern"""
    version: str
    config: Dict[str, Any]
    n: int
    nnz_factor: int
    fill_in: int
    op_count: float


class CoarsenReport(BaseModel):
    """Report of the standalone coarsen command"""
    version: str
    config: Dict[str, Any]
    n_vertices: int
    coarsening: CoarseningSummary


class ErrorDocument(BaseModel):
    """Machine-readable failure"""
    error: str
    message: str
    exit_code: int
