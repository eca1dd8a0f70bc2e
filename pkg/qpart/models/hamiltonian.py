"""
Diagonal Ising cost Hamiltonian
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from qpart.core.errors import InputError
from qpart.models.quantum import basis_linear_form

# (i, j, coefficient); a single-Z term on qubit j is written (j, j, h_j)
Term = Tuple[int, int, float]


@dataclass(frozen=True, eq=False)
class IsingHamiltonian:
    """H = constant + sum_j h_j Z_j + sum_{i<j} J_ij Z_i Z_j"""

    n_qubits: int
    constant: float
    linear: np.ndarray
    quad_index: np.ndarray  # (m, 2), i < j, sorted, distinct
    quad_coeffs: np.ndarray

    def __post_init__(self):
        if self.linear.shape != (self.n_qubits,):
            raise InputError("linear coefficients must have one entry per qubit")
        if not np.isfinite(self.constant) or not np.all(np.isfinite(self.linear)):
            raise InputError("Hamiltonian coefficients must be finite")
        if not np.all(np.isfinite(self.quad_coeffs)):
            raise InputError("Hamiltonian coefficients must be finite")
        if self.quad_index.shape[0]:
            i, j = self.quad_index[:, 0], self.quad_index[:, 1]
            if np.any(i >= j) or np.any(j >= self.n_qubits) or np.any(i < 0):
                raise InputError("ZZ terms need 0 <= i < j < n")
            keys = i * self.n_qubits + j
            if np.any(np.diff(keys) <= 0):
                raise InputError("ZZ terms must be sorted and distinct")

    @classmethod
    def from_terms(cls, n_qubits: int, constant: float, terms: Iterable[Term]) -> "IsingHamiltonian":
        """Build from (i, j, c) terms; (j, j, c) is a single-Z term"""
        linear = np.zeros(n_qubits, dtype=np.float64)
        pairs = {}
        for i, j, c in terms:
            i, j = int(i), int(j)
            if i == j:
                linear[i] += c
                continue
            key = (min(i, j), max(i, j))
            if key in pairs:
                raise InputError(f"duplicate ZZ term {key}")
            pairs[key] = float(c)
        keys = sorted(pairs)
        index = np.array(keys, dtype=np.int64).reshape(-1, 2)
        coeffs = np.array([pairs[k] for k in keys], dtype=np.float64)
        return cls(n_qubits, float(constant), linear, index, coeffs)

    def terms(self) -> List[Term]:
        """All non-constant nonzero terms, ordered by (i, j) with Z_j as (j, j)"""
        out: List[Term] = [
            (int(j), int(j), float(h)) for j, h in enumerate(self.linear) if h != 0.0
        ]
        out.extend(
            (int(i), int(j), float(c))
            for (i, j), c in zip(self.quad_index, self.quad_coeffs)
            if c != 0.0
        )
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    @property
    def n_terms(self) -> int:
        return len(self.terms())

    def energy(self, bits: Sequence[int]) -> float:
        """Energy of one basis state given as 0/1 bits (z = 1 - 2x)"""
        z = 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)
        value = self.constant + float(self.linear @ z)
        if self.quad_index.shape[0]:
            value += float(
                np.sum(self.quad_coeffs * z[self.quad_index[:, 0]] * z[self.quad_index[:, 1]])
            )
        return value

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        """Dense strictly-upper J matrix"""
        mat = np.zeros((self.n_qubits, self.n_qubits))
        if self.quad_index.shape[0]:
            mat[self.quad_index[:, 0], self.quad_index[:, 1]] = self.quad_coeffs
        return mat

    def diagonal(self) -> np.ndarray:
        """Energy on every basis state in O(2^n) by qubit doubling"""
        upper = self.coupling_matrix
        diag = np.zeros(1, dtype=np.float64)
        for k in range(self.n_qubits):
            couplings = upper[:k, k]
            # f = sum_{i<k} J_ik z_i with z_i = 1 - 2 x_i
            f = couplings.sum() - 2.0 * basis_linear_form(couplings)
            h = self.linear[k]
            diag = np.concatenate((diag + h + f, diag - h - f))
        return diag + self.constant

    def dump(self) -> str:
        """Text dump: const, Z and ZZ lines in term order"""
        lines = [f"const {self.constant:.17g}"]
        for i, j, c in self.terms():
            if i == j:
                lines.append(f"Z {j} {c:.17g}")
            else:
                lines.append(f"ZZ {i} {j} {c:.17g}")
        return "\n".join(lines) + "\n"
