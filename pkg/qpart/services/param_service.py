"""
Ramp-parameter sweeps, power-law extrapolation, presets and brute-force oracles
"""

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from qpart.core import rng
from qpart.core.config import settings
from qpart.core.errors import InputError, ResourceCapError
from qpart.models.graph import Assignment
from qpart.models.objective import GppObjective
from qpart.models.ordering import FactorStats, Permutation, SparsityPattern
from qpart.models.quantum import ProductState, index_to_bits, index_to_bitstring
from qpart.models.sweep import GppOptimum, PowerLawFit, PresetChoice, SweepResult
from qpart.services import encoding_service, qaoa_service

logger = logging.getLogger(__name__)

# Circuit depth and term-truncation constant per reference model
MODEL_PROFILES: Dict[str, Tuple[int, int]] = {
    "SedanCar": (5, 30),
    "JetEngine": (6, 80),
    "Impeller": (5, 55),
    "Drill": (5, 55),
}


def default_deltas() -> List[float]:
    """0.05, 0.10, ..., 2.00"""
    return [round(0.05 * i, 2) for i in range(1, 41)]


def sweep_delta(
    obj: GppObjective,
    deltas: Sequence[float],
    depths: Sequence[int],
    shots: int = 0,
    seed: Optional[int] = None,
) -> SweepResult:
    """Expectation of the exact objective after LR-QAOA from the uniform state"""
    if not deltas or not depths:
        raise InputError("sweep needs at least one delta and one depth")
    if shots and seed is None:
        raise InputError("a seed is required for shot-based sweeps")
    qaoa_service.check_qubit_cap(obj.n)

    h = encoding_service.to_ising(obj)
    diagonal = h.diagonal()
    energies = obj.energies()
    init = ProductState.uniform(obj.n)
    points = [(float(delta), int(p)) for p in depths for delta in deltas]

    def evaluate(task: Tuple[int, Tuple[float, int]]) -> float:
        t, (delta, p) = task
        sv = qaoa_service.run_circuit(h, qaoa_service.build_schedule(delta, p), init, diagonal=diagonal)
        if not shots:
            return qaoa_service.expectation(obj, sv, energies)
        samples = qaoa_service.sample(sv, shots, seed, (t,), rng.PARAM_SAMPLE)
        return float(samples.hits @ energies[samples.indices]) / shots

    with ThreadPoolExecutor(max_workers=settings.worker_count) as pool:
        values = list(pool.map(evaluate, enumerate(points)))

    grid = [(delta, p, value) for (delta, p), value in zip(points, values)]
    best: Dict[int, Tuple[float, float]] = {}
    for delta, p, value in grid:
        if p not in best or value < best[p][1]:
            best[p] = (delta, value)
    normalization = max(values)
    logger.info(
        "Sweep over %d points: %s",
        len(grid), ", ".join(f"p={p} delta*={d:g}" for p, (d, _) in sorted(best.items())),
    )
    return SweepResult(
        grid=grid,
        deltas=[float(d) for d in deltas],
        depths=[int(p) for p in depths],
        normalization=normalization,
        best=best,
        mode="shots" if shots else "exact",
    )


def mean_of_optima(results: Sequence[SweepResult], p: int) -> float:
    """Mean of the per-instance optimal delta at depth p"""
    optima = [r.best[p][0] for r in results if p in r.best]
    if not optima:
        raise InputError(f"no sweep covers depth p={p}")
    return float(np.mean(optima))


def fit_power_law(points: Sequence[Tuple[float, float]]) -> PowerLawFit:
    """Least squares on (log n, log delta)"""
    if len(points) < 2:
        raise InputError("power-law fit needs at least two points")
    n = np.array([p[0] for p in points], dtype=np.float64)
    delta = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(n <= 0) or np.any(delta <= 0):
        raise InputError("power-law fit needs positive sizes and deltas")
    x, y = np.log(n), np.log(delta)
    b, log_a = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (log_a + b * x)) ** 2)))
    return PowerLawFit(a=float(np.exp(log_a)), b=float(b), residual=residual)


def load_presets(path: Union[str, Path, None] = None) -> Dict[str, Dict[int, float]]:
    """Read {model -> {size -> delta}}"""
    path = Path(path or settings.PRESET_FILE)
    try:
        raw = json.loads(path.read_text())
    except (OSError, ValueError) as e:
        raise InputError(f"cannot read preset file {path}: {e}")
    return {model: {int(size): float(d) for size, d in table.items()} for model, table in raw.items()}


def resolve_preset(name: str, n_qubits: Optional[int] = None, path: Union[str, Path, None] = None) -> PresetChoice:
    """Resolve 'Model', 'Model:<size>' or 'Model:mean' to circuit parameters

    Sizes missing from the table are extrapolated with a power-law fit
    over the model's tabulated optima.
    """
    presets = load_presets(path)
    model, _, which = name.partition(":")
    if model not in presets:
        raise InputError(f"unknown preset model '{model}'; known: {', '.join(sorted(presets))}")
    table = presets[model]
    p, c_factor = MODEL_PROFILES.get(model, (5, 55))

    if which == "mean":
        size = n_qubits or 0
        return PresetChoice(model, size, float(np.mean(list(table.values()))), p, c_factor, "mean")
    if which:
        try:
            size = int(which)
        except ValueError:
            raise InputError(f"preset size '{which}' is not an integer")
    elif n_qubits is not None:
        size = n_qubits
    else:
        raise InputError(f"preset '{name}' needs a size")

    if size in table:
        return PresetChoice(model, size, table[size], p, c_factor, "table")
    fit = fit_power_law(sorted(table.items()))
    delta = fit.predict(size)
    logger.info("Preset %s: extrapolated delta %.4f at %d qubits", model, delta, size)
    return PresetChoice(model, size, delta, p, c_factor, "power_law", fit)


def brute_force_gpp(obj: GppObjective, cap: Optional[int] = None) -> GppOptimum:
    """Exhaustive minimum cut under the weighted balance constraint"""
    cap = settings.BRUTE_FORCE_QUBIT_CAP if cap is None else cap
    n = obj.n
    if n > cap:
        raise ResourceCapError("BRUTE_FORCE_QUBIT_CAP", cap, n, what="vertices")

    cut, load = obj.cut_and_load()
    total = obj.graph.total_vertex_weight
    heavier = np.maximum(load, total - load)
    feasible = heavier <= (0.5 + obj.nu) * total + 1e-12 * max(total, 1.0)

    energy = cut + obj.lam * (load - total / 2.0) ** 2
    qubo_index = int(np.argmin(energy))
    qubo_bitstring = index_to_bitstring(qubo_index, n)

    if not np.any(feasible):
        return GppOptimum(False, None, qubo_bitstring, float(energy[qubo_index]))

    masked = np.where(feasible, cut, np.inf)
    best_cut = masked.min()
    # lowest index is the lexicographically smallest bitstring
    tied = np.flatnonzero(masked <= best_cut + 1e-12 * max(1.0, abs(best_cut)))
    index = int(tied[0])
    assignment = Assignment.of(obj.graph, index_to_bits(index, n))
    return GppOptimum(True, assignment, qubo_bitstring, float(energy[qubo_index]))


def brute_force_eliminate(pattern: SparsityPattern, p: Permutation, cap: Optional[int] = None) -> FactorStats:
    """Eliminate the permuted pattern vertex by vertex, adding clique fill"""
    cap = settings.ELIMINATION_ORACLE_CAP if cap is None else cap
    if pattern.n > cap:
        raise ResourceCapError("ELIMINATION_ORACLE_CAP", cap, pattern.n, what="matrix rows")
    if p.n != pattern.n:
        raise InputError(f"permutation has {p.n} entries, pattern has {pattern.n} rows")

    permuted = pattern.permuted(p).matrix.tocoo()
    adjacency = [set() for _ in range(pattern.n)]
    for i, j in zip(permuted.row.tolist(), permuted.col.tolist()):
        if i != j:
            adjacency[i].add(j)

    counts = []
    for k in range(pattern.n):
        later = [j for j in adjacency[k] if j > k]
        counts.append(len(later))
        for a in later:
            adjacency[a].update(b for b in later if b != a)

    nnz_factor = sum(counts)
    ops = sum(c * (c + 3) // 2 for c in counts)
    return FactorStats(nnz_factor, nnz_factor - pattern.nnz_below, float(ops))


def sweep_csv(result: SweepResult) -> str:
    """Grid rows with a leading comment echoing the delta grid"""
    buffer = io.StringIO()
    buffer.write("# delta_grid: " + ",".join(repr(d) for d in result.deltas) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["delta", "p", "expectation", "normalized"])
    for delta, p, value in result.grid:
        writer.writerow([repr(delta), p, repr(value), repr(result.normalized(value))])
    return buffer.getvalue()
