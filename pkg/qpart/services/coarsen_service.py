"""
Spectral coarsening with screening
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from scipy.spatial.distance import cdist

from qpart.core import rng
from qpart.core.config import settings
from qpart.core.errors import InputError, InvariantViolation
from qpart.models.coarse import CoarseMap, ScreeningResult, ScreeningRound, SpectralEmbedding
from qpart.models.graph import Assignment, WeightedGraph
from qpart.schemas.config import FmConfig, ScreeningConfig
from qpart.services import fm_service, graph_service

logger = logging.getLogger(__name__)

KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-6


def default_dimension(n: int, k: int) -> int:
    return max(1, min(6, k - 1, n - 1))


def _smallest_modes(lap, count: int, dense_limit: int) -> Tuple[np.ndarray, np.ndarray]:
    """The `count` + 1 smallest eigenpairs of a connected Laplacian, ascending"""
    n = lap.shape[0]
    if n <= dense_limit or count + 1 >= n - 1:
        vals, vecs = scipy.linalg.eigh(lap.toarray())
        return vals[: count + 1], vecs[:, : count + 1]
    # Shift-invert Lanczos just below the zero eigenvalue
    v0 = rng.stream(0, "coarsen.lanczos", n).random(n)
    vals, vecs = scipy.sparse.linalg.eigsh(
        lap.tocsc(), k=count + 1, sigma=-1e-3, which="LM", v0=v0, tol=0.0
    )
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of every column positive"""
    if vecs.size == 0:
        return vecs
    pivots = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivots, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def spectral_embedding(g: WeightedGraph, d: int, dense_limit: Optional[int] = None) -> SpectralEmbedding:
    """Coordinates from the d smallest nontrivial Laplacian eigenvectors

    A disconnected graph is embedded per component: each component
    contributes its own nontrivial modes, zero outside the component, and
    the d smallest of these are kept. Missing columns are zero.
    """
    n = g.n_vertices
    dense_limit = settings.DENSE_EIGEN_LIMIT if dense_limit is None else dense_limit
    if d < 1 or d > n - 1:
        raise InputError(f"embedding dimension {d} must lie in 1..{n - 1}")

    labels = graph_service.connected_components(g)
    n_components = int(labels.max()) + 1
    lap = graph_service.laplacian(g)
    norm = float(np.max(np.abs(lap).sum(axis=1))) if lap.nnz else 0.0

    # candidates: (eigenvalue, component, padded vector)
    modes: List[Tuple[float, int, np.ndarray]] = []
    for c in range(n_components):
        members = np.flatnonzero(labels == c)
        if members.shape[0] < 2:
            continue
        local = lap[members][:, members]
        count = min(d, members.shape[0] - 1)
        vals, vecs = _smallest_modes(local, count, dense_limit)
        vecs = _fix_signs(vecs[:, 1:])
        for t in range(count):
            padded = np.zeros(n)
            padded[members] = vecs[:, t]
            modes.append((float(vals[t + 1]), c, padded))

    modes.sort(key=lambda m: (m[0], m[1]))
    modes = modes[:d]
    coords = np.zeros((n, d))
    eigenvalues = np.zeros(d)
    for t, (val, _, vec) in enumerate(modes):
        coords[:, t] = vec
        eigenvalues[t] = val

    residual = np.linalg.norm(lap @ coords - coords * eigenvalues, axis=0)
    if np.any(residual > 1e-8 * max(norm, 1.0)):
        raise InvariantViolation(
            f"Laplacian eigenvector residual {float(residual.max()):.3e} above tolerance"
        )
    if n_components > 1:
        logger.info("Graph has %d components; embedded per component", n_components)
    return SpectralEmbedding(coords, eigenvalues, n_components)


def _kmeans_plus_plus(points: np.ndarray, k: int, gen: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(gen.integers(n))]
    closest = cdist(points, points[chosen], "sqeuclidean").ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            nxt = int(gen.choice(n, p=closest / total))
        else:
            # every remaining point coincides with a center
            remaining = np.setdiff1d(np.arange(n), chosen)
            nxt = int(gen.choice(remaining))
        chosen.append(nxt)
        closest = np.minimum(closest, cdist(points, points[[nxt]], "sqeuclidean").ravel())
    return points[chosen].astype(np.float64)


def _repair_empty(points: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int) -> None:
    """Give every empty cluster the point farthest from its own centroid"""
    for c in range(k):
        sizes = np.bincount(labels, minlength=k)
        if sizes[c]:
            continue
        dist = np.sum((points - centers[labels]) ** 2, axis=1)
        dist[sizes[labels] < 2] = -1.0
        victim = int(np.argmax(dist))
        labels[victim] = c
        centers[c] = points[victim]


def kmeans(emb: SpectralEmbedding, k: int, seed: int, stream_index: Sequence[int] = ()) -> np.ndarray:
    """Lloyd iterations from k-means++ seeding; every cluster nonempty"""
    points = emb.coords
    n = points.shape[0]
    if k > n:
        raise InputError(f"cannot form {k} clusters from {n} points")
    if k < 1:
        raise InputError("k must be at least 1")
    gen = rng.stream(seed, rng.COARSEN_KMEANS, *stream_index)
    centers = _kmeans_plus_plus(points, k, gen)

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(KMEANS_MAX_ITER):
        labels = np.argmin(cdist(points, centers, "sqeuclidean"), axis=1)
        _repair_empty(points, labels, centers, k)
        updated = np.zeros_like(centers)
        np.add.at(updated, labels, points)
        updated /= np.bincount(labels, minlength=k)[:, None]
        shift = float(np.max(np.linalg.norm(updated - centers, axis=1)))
        centers = updated
        if shift < KMEANS_TOL:
            break
    return graph_service.relabel_by_first_occurrence(labels)


def contract(g: WeightedGraph, sigma: Sequence[int]) -> CoarseMap:
    """Merge each cluster into a supernode, summing vertex and crossing edge weights"""
    sigma = np.asarray(sigma, dtype=np.int64).copy()
    if sigma.shape != (g.n_vertices,):
        raise InputError("cluster map must have one label per vertex")
    if sigma.size == 0 or sigma.min() < 0:
        raise InputError("cluster labels must be non-negative")
    k = int(sigma.max()) + 1
    sizes = np.bincount(sigma, minlength=k)
    if np.any(sizes == 0):
        raise InputError(f"cluster {int(np.flatnonzero(sizes == 0)[0])} is empty")

    vertex_weights = np.bincount(sigma, weights=g.vertex_weights, minlength=k)
    if g.n_edges:
        a = sigma[g.edge_index[:, 0]]
        b = sigma[g.edge_index[:, 1]]
        crossing = a != b
        lo = np.minimum(a, b)[crossing]
        hi = np.maximum(a, b)[crossing]
        keys, inverse = np.unique(lo * k + hi, return_inverse=True)
        weights = np.bincount(inverse.ravel(), weights=g.edge_weights[crossing], minlength=keys.shape[0])
        index = np.stack((keys // k, keys % k), axis=1).astype(np.int64)
    else:
        index = np.zeros((0, 2), dtype=np.int64)
        weights = np.zeros(0)
    coarse = WeightedGraph(k, vertex_weights, index, weights.astype(np.float64))
    return CoarseMap(sigma, coarse)


def lift(coarse_x: Sequence[int], cm: CoarseMap) -> np.ndarray:
    """Fine x_i = coarse_x[sigma(i)]"""
    coarse_x = np.asarray(coarse_x, dtype=np.int8)
    if coarse_x.shape != (cm.k,):
        raise InputError(f"coarse assignment has {coarse_x.shape[0]} entries, map has {cm.k} clusters")
    return coarse_x[cm.sigma]


class Coarsener:
    """Screened spectral coarsening under one ScreeningConfig"""

    def __init__(self, cfg: ScreeningConfig, dense_eigen_limit: Optional[int] = None):
        self.cfg = cfg
        self.dense_eigen_limit = settings.DENSE_EIGEN_LIMIT if dense_eigen_limit is None else dense_eigen_limit
        self.refiner = fm_service.FmRefiner(FmConfig(nu=cfg.nu))

    def embed(self, g: WeightedGraph, d: int) -> SpectralEmbedding:
        return spectral_embedding(g, d, self.dense_eigen_limit)

    def screen_round(
        self,
        g: WeightedGraph,
        emb: Optional[SpectralEmbedding],
        round_index: int,
    ) -> Tuple[ScreeningRound, CoarseMap, Assignment]:
        """One k-means coarsening scored by the best of n_trials refined random starts"""
        cfg = self.cfg
        if emb is None:
            sigma = np.zeros(g.n_vertices, dtype=np.int64) if cfg.k == 1 else np.arange(g.n_vertices)
        else:
            sigma = kmeans(emb, cfg.k, cfg.seed, (round_index,))
        cm = contract(g, sigma)
        best, least = self.refiner.multi_start(
            cm.coarse, cfg.n_trials, cfg.seed, (round_index,), rng.COARSEN_TRIALS
        )
        chosen = best if best is not None else least
        record = ScreeningRound(
            round_index=round_index,
            proxy_cost=best.cut if best is not None else float("inf"),
            feasible=best is not None,
            imbalance=chosen.imbalance,
            best_cut=chosen.cut,
        )
        return record, cm, chosen

    def screen(self, g: WeightedGraph) -> ScreeningResult:
        """Screen n_screen k-means coarsenings of one embedding by refined proxy cut"""
        cfg = self.cfg
        n = g.n_vertices
        if cfg.k > n:
            raise InputError(f"k={cfg.k} exceeds the {n} graph vertices")

        emb = None
        d = None
        if 1 < cfg.k < n:
            d = cfg.d if cfg.d is not None else default_dimension(n, cfg.k)
            emb = self.embed(g, d)
        # with k == n or k == 1 every round yields the same map
        n_rounds = cfg.n_screen if emb is not None else 1

        with ThreadPoolExecutor(max_workers=settings.worker_count) as pool:
            outcomes = list(pool.map(lambda r: self.screen_round(g, emb, r), range(n_rounds)))

        winner = min(
            range(n_rounds),
            key=lambda r: (outcomes[r][0].proxy_cost, outcomes[r][0].imbalance, r),
        )
        record, cm, chosen = outcomes[winner]
        logger.info(
            "Screening picked round %d of %d: k=%d, proxy cut %s",
            winner, n_rounds, cm.k, record.proxy_cost if record.feasible else "infeasible",
        )
        return ScreeningResult(
            coarse_map=cm,
            proxy_cost=record.proxy_cost,
            feasible=record.feasible,
            round_index=winner,
            best_bits=np.asarray(chosen.bits, dtype=np.int8),
            embedding_disconnected=bool(emb is not None and emb.disconnected),
            rounds=[o[0] for o in outcomes],
            d=d,
        )


def screen_coarsenings(g: WeightedGraph, cfg: ScreeningConfig) -> ScreeningResult:
    return Coarsener(cfg).screen(g)
