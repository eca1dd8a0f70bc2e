"""
Iterative warm-started QAOA: execute, evaluate, reinitialize
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from qpart.core.config import settings
from qpart.core.errors import InputError, InvariantViolation
from qpart.models.graph import Assignment
from qpart.models.objective import GppObjective
from qpart.models.pool import RAW, REFINED, PoolEntry, SolutionPool
from qpart.models.quantum import (
    ProductState,
    bitstring_to_bits,
    bits_to_index,
    index_to_bits,
    index_to_bitstring,
)
from qpart.schemas.config import FmConfig, IterationConfig
from qpart.schemas.report import HistogramBin, IterationRecord
from qpart.services import encoding_service, fm_service, qaoa_service

logger = logging.getLogger(__name__)

HISTOGRAM_BINS = 20
EARLY_STOP_STREAK = 2
_COMPLEMENT = str.maketrans("01", "10")


def beta_schedule(iteration: int, n_iter: int) -> float:
    """beta_T = 9 x^2 + 1 with x running linearly from 0 to 1"""
    if n_iter < 1:
        raise InputError("n_iter must be at least 1")
    if not 0 <= iteration < n_iter:
        raise InputError(f"iteration {iteration} outside 0..{n_iter - 1}")
    x = iteration / (n_iter - 1) if n_iter > 1 else 1.0
    return 9.0 * x * x + 1.0


def boltzmann_weights(energies: Sequence[float], beta_t: float) -> np.ndarray:
    """P_j proportional to exp(-beta_T (E_j - min E))"""
    e = np.asarray(energies, dtype=np.float64)
    if e.size == 0:
        raise InputError("Boltzmann weights need at least one energy")
    if beta_t < 0:
        raise InputError("beta_T must be non-negative")
    w = np.exp(-beta_t * (e - e.min()))
    return w / w.sum()


def qubit_bias(pool_subset: Sequence[Tuple[str, float]]) -> np.ndarray:
    """m_q = sum_j P_j (-1)^{x_{q,j}}"""
    if not pool_subset:
        raise InputError("bias needs at least one bitstring")
    n = len(pool_subset[0][0])
    if any(len(s) != n for s, _ in pool_subset):
        raise InputError("bitstrings differ in length")
    probs = np.array([p for _, p in pool_subset], dtype=np.float64)
    if abs(probs.sum() - 1.0) > 1e-9:
        raise InputError(f"probabilities sum to {probs.sum()}, not 1")
    bits = np.array([bitstring_to_bits(s) for s, _ in pool_subset], dtype=np.float64).reshape(-1, n)
    return probs @ (1.0 - 2.0 * bits)


def next_init(m: Sequence[float], eta: int) -> ProductState:
    """rho_q = (1 - eta m_q) / 2, clamped to [0, 1]"""
    rho = np.clip(0.5 * (1.0 - eta * np.asarray(m, dtype=np.float64)), 0.0, 1.0)
    return ProductState(rho)


def canonical_bitstring(bitstring: str) -> str:
    """Representative of {x, ~x} with vertex 0 in part 0 (the last character)"""
    if bitstring.endswith("1"):
        return bitstring.translate(_COMPLEMENT)
    return bitstring


def warm_start(top: Sequence[PoolEntry], beta_t: float, eta: int) -> ProductState:
    """Next initial state from Boltzmann-weighted top entries"""
    # the energy is invariant under complement, so x and ~x would cancel in the bias
    weights = boltzmann_weights([e.energy for e in top], beta_t)
    bias = qubit_bias([(canonical_bitstring(e.bitstring), float(w)) for e, w in zip(top, weights)])
    return next_init(bias, eta)


class IterativeSolver:
    """Runs the execute-evaluate-reinitialize cycle on one objective"""

    def __init__(self, obj: GppObjective, cfg: IterationConfig, simulator: Optional[qaoa_service.QaoaSimulator] = None):
        self.obj = obj
        self.cfg = cfg
        self.simulator = simulator or qaoa_service.QaoaSimulator()
        self.refiner = fm_service.FmRefiner(FmConfig(nu=obj.nu, single_pass=True))

    def run(self) -> SolutionPool:
        """Run all iterations and return the pool with its run log"""
        obj, cfg = self.obj, self.cfg
        n = obj.n
        qaoa_service.check_qubit_cap(n, self.simulator.qubit_cap)

        h_full = encoding_service.to_ising(obj)
        h_circuit = (
            encoding_service.truncate_terms(h_full, cfg.c_factor) if cfg.c_factor else h_full
        )
        schedule = qaoa_service.build_schedule(cfg.delta, cfg.p)
        energies = obj.energies()
        logger.info(
            "Iterative QAOA: %d qubits, %d/%d circuit terms, p=%d, delta=%g",
            n, h_circuit.n_terms, h_full.n_terms, cfg.p, cfg.delta,
        )

        pool = SolutionPool(n)
        init = ProductState.uniform(n)
        previous_best = np.inf
        previous_top: Optional[List[str]] = None
        streak = 0

        for i in range(cfg.n_iter):
            sv = self.simulator.run(h_circuit, schedule, init)
            samples = qaoa_service.sample(sv, cfg.shots, cfg.seed, (i,))

            raw_energies = energies[samples.indices]
            raw = [
                PoolEntry(index_to_bitstring(idx, n), float(e), i, RAW)
                for idx, e in zip(samples.indices, raw_energies)
            ]
            refined_idx = self._refine(samples.indices) if cfg.fm_on_samples else None
            refined = []
            if refined_idx is not None:
                refined = [
                    PoolEntry(index_to_bitstring(idx, n), float(energies[idx]), i, REFINED)
                    for idx in refined_idx
                ]
            pool.merge(raw)
            pool.merge(refined)

            top = pool.top(cfg.top_k)
            beta_t = beta_schedule(i, cfg.n_iter)
            init = warm_start(top, beta_t, cfg.eta)

            best = pool.best.energy
            if best > previous_best:
                raise InvariantViolation(
                    f"best pool energy rose from {previous_best} to {best} at iteration {i}"
                )
            previous_best = best

            top_keys = [e.bitstring for e in top]
            changed = top_keys != previous_top
            streak = 0 if changed else streak + 1
            previous_top = top_keys

            record = self._record(
                i, beta_t, best, len(pool), samples.hits, raw_energies,
                energies[refined_idx] if refined_idx is not None else None, changed,
            )
            pool.records.append(record)
            logger.info(
                "Iteration %d: beta_T=%.3f best=%.6g mean sampled=%.6g pool=%d",
                i, beta_t, best, record.mean_sampled_energy, len(pool),
            )

            if cfg.early_stop and streak >= EARLY_STOP_STREAK:
                logger.info("Top-%d set unchanged for %d iterations; stopping", cfg.top_k, streak)
                break

        return pool

    def _refine(self, indices: np.ndarray) -> np.ndarray:
        """One FM pass per distinct sampled bitstring; results in input order"""
        g, n = self.obj.graph, self.obj.n

        def refine_one(idx: int) -> int:
            start = Assignment.of(g, index_to_bits(idx, n))
            return bits_to_index(self.refiner.refine(g, start).bits)

        with ThreadPoolExecutor(max_workers=settings.worker_count) as pool:
            return np.fromiter(pool.map(refine_one, indices.tolist()), dtype=np.int64, count=len(indices))

    @staticmethod
    def _record(
        iteration: int,
        beta_t: float,
        best: float,
        pool_size: int,
        hits: np.ndarray,
        raw_energies: np.ndarray,
        refined_energies: Optional[np.ndarray],
        changed: bool,
    ) -> IterationRecord:
        shots = float(hits.sum())
        mean_raw = float(hits @ raw_energies) / shots
        mean_refined = None
        combined = raw_energies
        if refined_energies is not None:
            mean_refined = float(hits @ refined_energies) / shots
            combined = np.concatenate((raw_energies, refined_energies))

        edges = np.histogram_bin_edges(combined, bins=HISTOGRAM_BINS)
        raw_counts, _ = np.histogram(raw_energies, bins=edges, weights=hits)
        refined_counts = (
            np.histogram(refined_energies, bins=edges, weights=hits)[0]
            if refined_energies is not None
            else np.zeros(HISTOGRAM_BINS)
        )
        histogram = [
            HistogramBin(
                lower=float(edges[b]),
                upper=float(edges[b + 1]),
                raw=int(round(raw_counts[b])),
                refined=int(round(refined_counts[b])),
            )
            for b in range(len(edges) - 1)
        ]
        return IterationRecord(
            iteration=iteration,
            beta_t=beta_t,
            best_energy=best,
            pool_size=pool_size,
            mean_sampled_energy=mean_raw,
            mean_refined_energy=mean_refined,
            distinct_sampled=int(hits.shape[0]),
            top_k_changed=changed,
            histogram=histogram,
        )


def run_iterative_qaoa(obj: GppObjective, cfg: IterationConfig) -> SolutionPool:
    """Iterative QAOA with Boltzmann-ranked warm starts"""
    return IterativeSolver(obj, cfg).run()
