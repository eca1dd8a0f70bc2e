import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from qpart.core import rng
from qpart.core.errors import InputError
from qpart.models.coarse import SpectralEmbedding
from qpart.models.graph import Assignment, WeightedGraph
from qpart.schemas.config import ScreeningConfig
from qpart.services import coarsen_service, graph_service
from tests.strategies import small_graphs


class TestSpectralEmbedding:
    def test_path_eigenvalues(self):
        g = graph_service.path_graph(10)
        emb = coarsen_service.spectral_embedding(g, 3)
        expected = [2 - 2 * np.cos(k * np.pi / 10) for k in (1, 2, 3)]
        assert np.allclose(emb.eigenvalues, expected)
        assert emb.coords.shape == (10, 3)
        assert not emb.disconnected

    def test_sparse_solver_matches_dense(self):
        g = graph_service.grid_graph(25, 20)
        emb = coarsen_service.spectral_embedding(g, 3)
        dense = scipy.linalg.eigh(graph_service.laplacian(g).toarray(), eigvals_only=True)
        assert np.allclose(emb.eigenvalues, dense[1:4], atol=1e-8)

    def test_fiedler_vector_orders_the_path(self):
        emb = coarsen_service.spectral_embedding(graph_service.path_graph(8), 1)
        fiedler = emb.coords[:, 0]
        assert np.all(np.diff(fiedler) > 0) or np.all(np.diff(fiedler) < 0)

    def test_sign_is_deterministic(self, pinned_graph):
        a = coarsen_service.spectral_embedding(pinned_graph, 3)
        b = coarsen_service.spectral_embedding(pinned_graph, 3)
        assert np.array_equal(a.coords, b.coords)
        pivots = np.argmax(np.abs(a.coords), axis=0)
        assert np.all(a.coords[pivots, np.arange(3)] > 0)

    def test_dimension_range(self, c4):
        with pytest.raises(InputError):
            coarsen_service.spectral_embedding(c4, 4)

    def test_disconnected_graph(self):
        halves = [(i, j) for base in (0, 4) for i in range(base, base + 4) for j in range(i + 1, base + 4)]
        g = WeightedGraph.from_edges(8, halves)
        emb = coarsen_service.spectral_embedding(g, 2)
        assert emb.n_components == 2
        assert np.allclose(emb.eigenvalues, [4.0, 4.0])


class TestKmeans:
    def test_labels_cover_every_cluster(self, pinned_graph):
        emb = coarsen_service.spectral_embedding(pinned_graph, 3)
        labels = coarsen_service.kmeans(emb, 4, seed=5)
        assert sorted(set(labels.tolist())) == [0, 1, 2, 3]
        assert labels[0] == 0

    def test_seeded(self, pinned_graph):
        emb = coarsen_service.spectral_embedding(pinned_graph, 3)
        a = coarsen_service.kmeans(emb, 4, seed=5, stream_index=(2,))
        b = coarsen_service.kmeans(emb, 4, seed=5, stream_index=(2,))
        assert np.array_equal(a, b)

    def test_empty_cluster_repaired(self):
        emb = SpectralEmbedding(np.array([[0.0], [0.0], [0.0], [1.0]]), np.array([1.0]))
        labels = coarsen_service.kmeans(emb, 3, seed=0)
        assert np.all(np.bincount(labels, minlength=3) > 0)

    def test_too_many_clusters(self):
        emb = SpectralEmbedding(np.zeros((2, 1)), np.array([1.0]))
        with pytest.raises(InputError):
            coarsen_service.kmeans(emb, 3, seed=0)


class TestContraction:
    def test_path_halves(self):
        cm = coarsen_service.contract(graph_service.path_graph(4), [0, 0, 1, 1])
        assert cm.k == 2
        assert list(cm.coarse.vertex_weights) == [2.0, 2.0]
        assert cm.coarse.edges == [(0, 1, 1.0)]
        assert cm.dump() == "1 1\n2 1\n3 2\n4 2\n"

    def test_parallel_edges_are_summed(self, c4):
        cm = coarsen_service.contract(c4, [0, 1, 1, 0])
        assert cm.coarse.edges == [(0, 1, 2.0)]

    def test_empty_cluster_rejected(self):
        with pytest.raises(InputError):
            coarsen_service.contract(graph_service.path_graph(3), [0, 2, 2])

    @settings(max_examples=50, deadline=None)
    @given(small_graphs(min_vertices=2, max_vertices=8), st.data())
    def test_lift_preserves_cut_and_weights(self, g, data):
        k = data.draw(st.integers(1, g.n_vertices))
        sigma = list(range(k)) + data.draw(
            st.lists(st.integers(0, k - 1), min_size=g.n_vertices - k, max_size=g.n_vertices - k)
        )
        cm = coarsen_service.contract(g, sigma)
        coarse_bits = data.draw(st.lists(st.integers(0, 1), min_size=k, max_size=k))
        coarse = Assignment.of(cm.coarse, coarse_bits)
        fine = Assignment.of(g, coarsen_service.lift(coarse_bits, cm))
        assert fine.cut == pytest.approx(coarse.cut)
        assert fine.part_weights == pytest.approx(coarse.part_weights)

    def test_lift_length_checked(self, c4):
        cm = coarsen_service.contract(c4, [0, 0, 1, 1])
        with pytest.raises(InputError):
            coarsen_service.lift([0, 1, 1], cm)


class TestScreening:
    def config(self, **overrides) -> ScreeningConfig:
        values = dict(k=4, n_screen=3, n_trials=20, nu=0.3, seed=1)
        values.update(overrides)
        return ScreeningConfig(**values)

    def test_winner_has_least_proxy_cost(self, pinned_graph):
        result = coarsen_service.screen_coarsenings(pinned_graph, self.config())
        assert result.coarse_map.k == 4
        assert len(result.rounds) == 3
        assert result.proxy_cost == min(r.proxy_cost for r in result.rounds)
        assert result.d == 3

    def test_seeded(self, pinned_graph):
        a = coarsen_service.screen_coarsenings(pinned_graph, self.config())
        b = coarsen_service.screen_coarsenings(pinned_graph, self.config())
        assert np.array_equal(a.coarse_map.sigma, b.coarse_map.sigma)
        assert a.rounds == b.rounds

    def test_best_bits_lift_to_the_proxy_cut(self, pinned_graph):
        result = coarsen_service.screen_coarsenings(pinned_graph, self.config())
        fine = Assignment.of(pinned_graph, coarsen_service.lift(result.best_bits, result.coarse_map))
        assert fine.cut == pytest.approx(result.proxy_cost)

    def test_k_above_n(self, c4):
        with pytest.raises(InputError):
            coarsen_service.screen_coarsenings(c4, self.config(k=5))

    def test_k_equal_n_is_identity(self, c4):
        result = coarsen_service.screen_coarsenings(c4, self.config())
        assert list(result.coarse_map.sigma) == [0, 1, 2, 3]
        assert len(result.rounds) == 1
        assert result.proxy_cost == 2.0

    def test_disconnected_input_is_flagged(self):
        halves = [(i, j) for base in (0, 4) for i in range(base, base + 4) for j in range(i + 1, base + 4)]
        g = WeightedGraph.from_edges(8, halves)
        result = coarsen_service.screen_coarsenings(g, self.config(k=2))
        assert result.embedding_disconnected
        assert result.coarse_map.k == 2


class TestLargeCoarsening:
    @pytest.mark.parametrize("seed", range(5))
    def test_lift_preserves_cut_and_weights(self, seed):
        gen = rng.stream(seed, "test.coarsen")
        n = int(gen.integers(120, 201))
        k = int(gen.integers(8, 33))
        g = graph_service.random_graph(n, 0.04, seed=seed, weighted=True, connected=True)
        cfg = ScreeningConfig(k=k, n_screen=2, n_trials=5, nu=0.1, seed=seed)
        # a low dense limit sends the eigensolve through the sparse Lanczos path
        result = coarsen_service.Coarsener(cfg, dense_eigen_limit=32).screen(g)
        cm = result.coarse_map
        assert cm.k == k
        assert cm.coarse.total_vertex_weight == pytest.approx(g.total_vertex_weight)
        for _ in range(5):
            coarse_bits = gen.integers(0, 2, size=k)
            coarse = Assignment.of(cm.coarse, coarse_bits)
            fine = Assignment.of(g, coarsen_service.lift(coarse_bits, cm))
            assert fine.cut == pytest.approx(coarse.cut)
            assert fine.part_weights == pytest.approx(coarse.part_weights)
        chosen = Assignment.of(g, coarsen_service.lift(result.best_bits, cm))
        if result.feasible:
            assert chosen.cut == pytest.approx(result.proxy_cost)

    def test_sparse_eigensolver_matches_dense(self):
        g = graph_service.random_graph(150, 0.05, seed=3, connected=True)
        sparse = coarsen_service.spectral_embedding(g, 4, dense_limit=32)
        dense = coarsen_service.spectral_embedding(g, 4)
        assert np.allclose(sparse.eigenvalues, dense.eigenvalues, atol=1e-8)

    def test_many_empty_clusters_repaired(self):
        points = np.repeat(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), 15, axis=0)
        emb = SpectralEmbedding(points, np.array([1.0, 1.0]))
        labels = coarsen_service.kmeans(emb, 10, seed=2)
        assert np.all(np.bincount(labels, minlength=10) > 0)
        assert labels.max() == 9
