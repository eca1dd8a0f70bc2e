import functools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from qpart.core import rng
from qpart.core.errors import InputError, ResourceCapError
from qpart.models.hamiltonian import IsingHamiltonian
from qpart.models.objective import GppObjective
from qpart.models.quantum import ProductState, Statevector
from qpart.services import encoding_service, graph_service, qaoa_service

Z = np.diag([1.0, -1.0])


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]])


def _embed(op: np.ndarray, q: int, n: int) -> np.ndarray:
    # qubit 0 is the least-significant bit, so it is the last kron factor
    factors = [op if k == q else np.eye(2) for k in reversed(range(n))]
    return functools.reduce(np.kron, factors)


def dense_circuit(diag, sched, rho) -> np.ndarray:
    """Reference state built from dense matrix exponentials"""
    n = len(rho)
    thetas = 2.0 * np.arcsin(np.sqrt(rho))
    vectors = [np.array([np.sqrt(1.0 - r), np.sqrt(r)]) for r in reversed(rho)]
    state = functools.reduce(np.kron, vectors).astype(np.complex128)
    h_mix = -sum(_embed(_ry(t) @ Z @ _ry(t).T, q, n) for q, t in enumerate(thetas))
    for gamma, beta in zip(sched.gammas, sched.betas):
        state = np.exp(-1j * gamma * diag) * state
        state = expm(-1j * beta * h_mix) @ state
    return state


class TestSchedule:
    def test_linear_ramp(self):
        sched = qaoa_service.build_schedule(1.0, 5)
        assert sched.gammas == (0.2, 0.4, 0.6, 0.8, 1.0)
        assert sched.betas == (1.0, 0.8, 0.6, 0.4, 0.2)

    @given(st.floats(0.01, 3.0), st.integers(1, 12))
    def test_angles_sum(self, delta, p):
        sched = qaoa_service.build_schedule(delta, p)
        assert sum(sched.gammas) == pytest.approx(delta * (p + 1) / 2)
        assert sched.gammas[-1] == pytest.approx(delta)
        assert sched.betas[0] == pytest.approx(delta)

    def test_depth_must_be_positive(self):
        with pytest.raises(InputError):
            qaoa_service.build_schedule(1.0, 0)


class TestStatePreparation:
    def test_uniform(self):
        sv = qaoa_service.prepare_state(ProductState.uniform(3))
        assert np.allclose(sv.amplitudes, np.full(8, 1 / np.sqrt(8)))

    def test_warm_start_amplitudes(self):
        sv = qaoa_service.prepare_state(ProductState.from_rho([1.0, 0.0]))
        # qubit 0 in |1>, qubit 1 in |0> is basis index 1
        assert np.allclose(sv.probabilities, [0.0, 1.0, 0.0, 0.0])

    def test_rho_bounds(self):
        with pytest.raises(InputError):
            ProductState.from_rho([1.2])


class TestCircuit:
    @pytest.mark.parametrize("seed", range(25))
    def test_matches_dense_reference(self, seed):
        gen = rng.stream(seed, "test.circuit")
        n = int(gen.integers(2, 7))
        p = int(gen.integers(1, 7))
        delta = float(gen.uniform(0.05, 2.0))
        rho = gen.uniform(0.0, 1.0, size=n)
        # pinned qubits exercise the |0> and |1> mixer axes
        rho[gen.random(n) < 0.2] = float(gen.integers(0, 2))
        g = graph_service.random_graph(n, 0.6, seed=seed, weighted=True)
        h = encoding_service.to_ising(GppObjective(g, lam=float(gen.uniform(0.1, 2.0))))
        sched = qaoa_service.build_schedule(delta, p)
        ps = ProductState.from_rho(rho)
        sv = qaoa_service.run_circuit(h, sched, ps)
        ref = Statevector(n, dense_circuit(h.diagonal(), sched, rho))
        assert sv.norm == pytest.approx(1.0)
        assert sv.fidelity(ref) == pytest.approx(1.0, abs=1e-10)

    def test_uniform_mixer_is_minus_x(self):
        u = qaoa_service.mixer_unitary(np.pi / 2, 0.3)
        x = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(u, expm(1j * 0.3 * x))

    def test_single_z_cost_phase(self):
        h = IsingHamiltonian.from_terms(1, 0.0, [(0, 0, 1.0)])
        sv = qaoa_service.prepare_state(ProductState.uniform(1))
        out = qaoa_service.apply_cost_layer(sv, h, np.pi / 2)
        assert np.allclose(out.amplitudes, np.array([np.exp(-0.5j * np.pi), np.exp(0.5j * np.pi)]) / np.sqrt(2))

    @settings(deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=4), st.floats(-2.0, 2.0))
    def test_product_state_is_mixer_eigenstate(self, rho, beta):
        ps = ProductState.from_rho(rho)
        sv = qaoa_service.prepare_state(ps)
        mixed = qaoa_service.apply_mixer_layer(sv, ps, beta)
        assert mixed.fidelity(sv) == pytest.approx(1.0, abs=1e-9)

    def test_zero_delta_is_identity(self, pinned_graph):
        sub, _ = graph_service.induced_subgraph(pinned_graph, range(8))
        h = encoding_service.to_ising(GppObjective(sub, lam=0.2))
        ps = ProductState.from_rho(np.linspace(0.1, 0.9, 8))
        sv = qaoa_service.run_circuit(h, qaoa_service.build_schedule(0.0, 4), ps)
        assert np.allclose(sv.amplitudes, qaoa_service.prepare_state(ps).amplitudes)

    def test_constant_hamiltonian_keeps_uniform_state(self, single_edge):
        h = encoding_service.to_ising(GppObjective(single_edge, lam=1.0))
        sv = qaoa_service.run_circuit(h, qaoa_service.build_schedule(1.3, 5), ProductState.uniform(2))
        assert np.allclose(sv.probabilities, 0.25)

    def test_qubit_cap(self, single_edge):
        h = encoding_service.to_ising(GppObjective(single_edge))
        with pytest.raises(ResourceCapError) as exc:
            qaoa_service.run_circuit(
                h, qaoa_service.build_schedule(1.0, 1), ProductState.uniform(2), qubit_cap=1
            )
        assert exc.value.exit_code == 2

    def test_simulator_reuses_diagonal(self, c4):
        h = encoding_service.to_ising(GppObjective(c4, lam=0.5))
        sim = qaoa_service.QaoaSimulator()
        first = sim.diagonal(h)
        assert sim.diagonal(h) is first


class TestSampling:
    def _state(self, c4):
        h = encoding_service.to_ising(GppObjective(c4, lam=0.5))
        return qaoa_service.run_circuit(h, qaoa_service.build_schedule(0.9, 2), ProductState.uniform(4))

    def test_same_seed_same_counts(self, c4):
        sv = self._state(c4)
        a = qaoa_service.sample(sv, 1000, seed=7, stream_index=(3,))
        b = qaoa_service.sample(sv, 1000, seed=7, stream_index=(3,))
        assert a.counts == b.counts
        assert sum(a.counts.values()) == 1000

    def test_stream_index_changes_draw(self, c4):
        sv = self._state(c4)
        a = qaoa_service.sample(sv, 1000, seed=7, stream_index=(0,))
        b = qaoa_service.sample(sv, 1000, seed=7, stream_index=(1,))
        assert a.counts != b.counts

    def test_indices_ascending_and_distinct(self, c4):
        s = qaoa_service.sample(self._state(c4), 500, seed=1)
        assert np.all(np.diff(s.indices) > 0)
        assert s.distinct == len(s.counts)

    def test_zero_shots_rejected(self, c4):
        with pytest.raises(InputError):
            qaoa_service.sample(self._state(c4), 0, seed=1)

    def test_expectation_of_uniform_state(self, c4):
        obj = GppObjective(c4, lam=0.5)
        sv = qaoa_service.prepare_state(ProductState.uniform(4))
        assert qaoa_service.expectation(obj, sv) == pytest.approx(obj.energies().mean())
