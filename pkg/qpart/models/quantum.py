"""
Circuit-level types and basis-state helpers

Qubit q is bit q of a basis index (qubit 0 is the least-significant bit).
Bitstrings are rendered most-significant-first, so vertex 0 is the last
character.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Sequence

import numpy as np

from qpart.core.errors import InputError


def index_to_bitstring(index: int, n: int) -> str:
    return format(int(index), f"0{n}b") if n else ""


def bitstring_to_index(bitstring: str) -> int:
    return int(bitstring, 2) if bitstring else 0


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for q, b in enumerate(bits):
        if b:
            index |= 1 << q
    return index


def index_to_bits(index: int, n: int) -> np.ndarray:
    return ((int(index) >> np.arange(n)) & 1).astype(np.int8)


def bitstring_to_bits(bitstring: str) -> np.ndarray:
    return np.array([int(c) for c in reversed(bitstring)], dtype=np.int8)


def bits_to_bitstring(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in reversed(list(bits)))


def basis_linear_form(coeffs: Sequence[float]) -> np.ndarray:
    """Values of sum_q c_q x_q on every basis index, built by doubling"""
    out = np.zeros(1, dtype=np.float64)
    for c in coeffs:
        out = np.concatenate((out, out + c))
    return out


@dataclass(frozen=True)
class RampSchedule:
    """Linear-ramp angles derived from a single scalar"""

    p: int
    delta: float
    gammas: tuple
    betas: tuple


@dataclass(frozen=True, eq=False)
class ProductState:
    """Per-qubit warm start sqrt(1-rho)|0> + sqrt(rho)|1>"""

    rho: np.ndarray

    def __post_init__(self):
        if self.rho.ndim != 1:
            raise InputError("rho must be a vector")
        if np.any(~np.isfinite(self.rho)) or np.any(self.rho < 0) or np.any(self.rho > 1):
            raise InputError("rho entries must lie in [0, 1]")
        self.rho.setflags(write=False)

    @classmethod
    def uniform(cls, n_qubits: int) -> "ProductState":
        return cls(np.full(n_qubits, 0.5))

    @classmethod
    def from_rho(cls, rho: Sequence[float]) -> "ProductState":
        return cls(np.array(rho, dtype=np.float64))

    @property
    def n_qubits(self) -> int:
        return int(self.rho.shape[0])

    @cached_property
    def theta(self) -> np.ndarray:
        return 2.0 * np.arcsin(np.sqrt(self.rho))


@dataclass(frozen=True, eq=False)
class Statevector:
    """2^n complex amplitudes"""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise InputError(
                f"statevector of {self.n_qubits} qubits needs {1 << self.n_qubits} amplitudes"
            )

    @cached_property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def fidelity(self, other: "Statevector") -> float:
        """|<self|other>|^2"""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def dump(self) -> str:
        """Debug text dump: index re im per line"""
        return "".join(
            f"{i} {a.real:.17g} {a.imag:.17g}\n" for i, a in enumerate(self.amplitudes)
        )


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Measurement outcomes as distinct basis indices with hit counts"""

    n_qubits: int
    indices: np.ndarray  # ascending, distinct
    hits: np.ndarray
    shots: int
    seed: int

    @property
    def counts(self) -> Dict[str, int]:
        return {
            index_to_bitstring(i, self.n_qubits): int(c)
            for i, c in zip(self.indices, self.hits)
        }

    @property
    def distinct(self) -> int:
        return int(self.indices.shape[0])
