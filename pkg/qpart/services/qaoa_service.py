"""
Statevector simulation of linear-ramp QAOA circuits
"""

import logging
from typing import Optional, Sequence

import numpy as np

from qpart.core import rng
from qpart.core.config import settings
from qpart.core.errors import InputError, ResourceCapError
from qpart.models.hamiltonian import IsingHamiltonian
from qpart.models.objective import GppObjective
from qpart.models.quantum import ProductState, RampSchedule, SampleSet, Statevector

logger = logging.getLogger(__name__)


def check_qubit_cap(n_qubits: int, cap: Optional[int] = None) -> None:
    cap = settings.STATEVECTOR_QUBIT_CAP if cap is None else cap
    if n_qubits > cap:
        raise ResourceCapError("STATEVECTOR_QUBIT_CAP", cap, n_qubits)


def build_schedule(delta: float, p: int) -> RampSchedule:
    """gamma_k = (k/p) delta, beta_k = ((p-k+1)/p) delta for k = 1..p"""
    if p < 1:
        raise InputError("circuit depth p must be at least 1")
    if not np.isfinite(delta):
        raise InputError("delta must be finite")
    gammas = tuple((k / p) * delta for k in range(1, p + 1))
    betas = tuple(((p - k + 1) / p) * delta for k in range(1, p + 1))
    return RampSchedule(p=p, delta=float(delta), gammas=gammas, betas=betas)


def prepare_state(ps: ProductState) -> Statevector:
    """Tensor product of sqrt(1-rho_q)|0> + sqrt(rho_q)|1>"""
    amps = np.ones(1, dtype=np.complex128)
    for r in ps.rho:
        amps = np.concatenate((amps * np.sqrt(1.0 - r), amps * np.sqrt(r)))
    return Statevector(ps.n_qubits, amps)


def apply_cost_layer(
    sv: Statevector,
    h: IsingHamiltonian,
    gamma: float,
    diagonal: Optional[np.ndarray] = None,
) -> Statevector:
    """Multiply amplitude x by exp(-i gamma E_h(x))"""
    if h.n_qubits != sv.n_qubits:
        raise InputError(f"Hamiltonian has {h.n_qubits} qubits, state has {sv.n_qubits}")
    if diagonal is None:
        diagonal = h.diagonal()
    return Statevector(sv.n_qubits, sv.amplitudes * np.exp(-1j * gamma * diagonal))


def mixer_unitary(theta: float, beta: float) -> np.ndarray:
    """R_y(theta) R_z(-2 beta) R_y(-theta)"""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    ry = np.array([[c, -s], [s, c]], dtype=np.complex128)
    rz = np.diag([np.exp(1j * beta), np.exp(-1j * beta)])
    return ry @ rz @ ry.T


def _apply_one_qubit(amps: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    view = amps.reshape(1 << (n - 1 - q), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", u, view).reshape(-1)


def apply_mixer_layer(sv: Statevector, ps: ProductState, beta: float) -> Statevector:
    """Warm-start mixer: per-qubit rotation whose eigenstate is the product state"""
    if ps.n_qubits != sv.n_qubits:
        raise InputError(f"warm start has {ps.n_qubits} qubits, state has {sv.n_qubits}")
    amps = sv.amplitudes
    for q, theta in enumerate(ps.theta):
        amps = _apply_one_qubit(amps, sv.n_qubits, q, mixer_unitary(theta, beta))
    return Statevector(sv.n_qubits, amps)


def run_circuit(
    h: IsingHamiltonian,
    sched: RampSchedule,
    ps: ProductState,
    qubit_cap: Optional[int] = None,
    diagonal: Optional[np.ndarray] = None,
) -> Statevector:
    """prod_k e^{-i beta_k H_M} e^{-i gamma_k H_C} applied to the product state"""
    if h.n_qubits != ps.n_qubits:
        raise InputError(f"Hamiltonian has {h.n_qubits} qubits, warm start has {ps.n_qubits}")
    check_qubit_cap(h.n_qubits, qubit_cap)
    if diagonal is None:
        diagonal = h.diagonal()
    sv = prepare_state(ps)
    for gamma, beta in zip(sched.gammas, sched.betas):
        sv = apply_cost_layer(sv, h, gamma, diagonal)
        sv = apply_mixer_layer(sv, ps, beta)
    return sv


def sample(
    sv: Statevector,
    shots: int,
    seed: int,
    stream_index: Sequence[int] = (),
    stream_name: str = rng.QAOA_SAMPLE,
) -> SampleSet:
    """Draw `shots` basis states from |amplitude|^2"""
    if shots < 1:
        raise InputError("shots must be at least 1")
    probs = sv.probabilities
    probs = probs / probs.sum()
    gen = rng.stream(seed, stream_name, *stream_index)
    hits = gen.multinomial(shots, probs)
    indices = np.flatnonzero(hits)
    return SampleSet(sv.n_qubits, indices, hits[indices], shots, seed)


def expectation(obj: GppObjective, sv: Statevector, energies: Optional[np.ndarray] = None) -> float:
    """sum_x |amp(x)|^2 C(x) with the exact objective"""
    if obj.n != sv.n_qubits:
        raise InputError(f"objective has {obj.n} vertices, state has {sv.n_qubits} qubits")
    if energies is None:
        energies = obj.energies()
    return float(sv.probabilities @ energies)


class QaoaSimulator:
    """Circuit runner holding the qubit cap and the cost diagonal of the last Hamiltonian"""

    def __init__(self, qubit_cap: Optional[int] = None):
        self.qubit_cap = settings.STATEVECTOR_QUBIT_CAP if qubit_cap is None else qubit_cap
        self._cached_h: Optional[IsingHamiltonian] = None
        self._cached_diagonal: Optional[np.ndarray] = None

    def diagonal(self, h: IsingHamiltonian) -> np.ndarray:
        check_qubit_cap(h.n_qubits, self.qubit_cap)
        if self._cached_h is not h:
            self._cached_diagonal = h.diagonal()
            self._cached_h = h
        return self._cached_diagonal

    def run(self, h: IsingHamiltonian, sched: RampSchedule, ps: ProductState) -> Statevector:
        return run_circuit(h, sched, ps, self.qubit_cap, self.diagonal(h))
