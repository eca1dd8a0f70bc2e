"""
Parameter-landscape and oracle result types
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from qpart.models.graph import Assignment


@dataclass(frozen=True)
class SweepResult:
    """Exact (or shot-estimated) expectation over a (delta, p) grid"""

    grid: List[Tuple[float, int, float]]  # (delta, p, expectation), p-major
    deltas: List[float]
    depths: List[int]
    normalization: float
    best: Dict[int, Tuple[float, float]]  # p -> (delta, expectation)
    mode: str = "exact"

    def normalized(self, expectation: float) -> float:
        return expectation / self.normalization if self.normalization > 0 else 0.0


@dataclass(frozen=True)
class PowerLawFit:
    """delta(n) = a * n^b fitted in log-log space"""

    a: float
    b: float
    residual: float  # RMS of log residuals

    def predict(self, n: float) -> float:
        return self.a * n ** self.b


@dataclass(frozen=True)
class GppOptimum:
    """Exhaustive balanced bipartition optimum and the unconstrained QUBO minimum"""

    feasible: bool
    assignment: Optional[Assignment]
    qubo_min_bitstring: str
    qubo_min_energy: float


@dataclass(frozen=True)
class PresetChoice:
    """Circuit parameters resolved from a model preset"""

    model: str
    size: int
    delta: float
    p: int
    c_factor: int
    rule: str  # table, mean or power_law
    fit: Optional[PowerLawFit] = field(default=None, compare=False)
