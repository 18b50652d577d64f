import math

import numpy as np
import pytest

from masc.graph import GraphConfig, build_knn_graph, dump_edges, estimate_sigma, normalize_similarity
from oracles import brute_force_neighbors


class TestEstimateSigma:
    def test_equal_distances(self):
        X = np.array([[0.0], [4.0]])
        assert estimate_sigma(X) == 2.0

    def test_enumerated_three_points(self):
        X = np.array([[0.0], [1.0], [3.0]])
        # pairwise distances {1, 2, 3}, median 2
        assert estimate_sigma(X) == 1.0

    def test_deterministic_with_subsampling(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(2000, 3))
        cfg = GraphConfig(sigma_sample_cap=500, sigma_seed=7)
        assert estimate_sigma(X, cfg) == estimate_sigma(X, cfg)

    def test_zero_median_errors(self):
        X = np.zeros((5, 2))
        with pytest.raises(ValueError, match="zero median"):
            estimate_sigma(X)


class TestBuildKnnGraph:
    def test_duplicate_points_weight_one(self):
        X = np.array([[1.0, 1.0], [1.0, 1.0]])
        g = build_knn_graph(X, GraphConfig(k=1, sigma=1.0))
        assert g.H[0, 1] == 1.0
        assert g.H[0, 0] == 0.0

    def test_analytic_weight(self):
        sigma = 1.5
        dist = sigma * math.sqrt(2.0)
        X = np.array([[0.0], [dist]])
        g = build_knn_graph(X, GraphConfig(k=1, sigma=sigma))
        assert g.H[0, 1] == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_non_neighbors_zero(self):
        # 4 colinear points; with k=1 the two far ends never link
        X = np.array([[0.0], [1.0], [10.0], [11.0]])
        g = build_knn_graph(X, GraphConfig(k=1, sigma=1.0))
        assert g.H[0, 2] == 0.0 and g.H[0, 3] == 0.0
        assert g.H[0, 1] > 0.0 and g.H[2, 3] > 0.0

    def test_needs_k_plus_one(self):
        with pytest.raises(ValueError, match="k\\+1"):
            build_knn_graph(np.zeros((3, 2)), GraphConfig(k=3, sigma=1.0))

    def test_symmetry_exact(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(40, 3))
        g = build_knn_graph(X, GraphConfig(k=4, sigma=1.0))
        H = g.H.toarray()
        S = g.S.toarray()
        np.testing.assert_array_equal(H, H.T)
        np.testing.assert_array_equal(S, S.T)
        assert np.all(H.diagonal() == 0.0)

    def test_knn_containment(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(30, 2))
        k = 3
        g = build_knn_graph(X, GraphConfig(k=k, sigma=1.0))
        H = g.H.toarray()
        for i, nbrs in enumerate(brute_force_neighbors(X, k)):
            for j in nbrs:
                assert H[i, j] > 0.0

    def test_eigenvalues_within_unit_interval(self):
        rng = np.random.default_rng(3)
        for n, k in ((12, 2), (30, 5), (50, 4)):
            X = rng.normal(size=(n, 3))
            g = build_knn_graph(X, GraphConfig(k=k, sigma=1.0))
            vals = np.linalg.eigvalsh(g.S.toarray())
            assert vals.min() >= -1.0 - 1e-10
            assert vals.max() <= 1.0 + 1e-10

    def test_sigma_monotonicity(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(25, 3))
        g1 = build_knn_graph(X, GraphConfig(k=3, sigma=0.7))
        g2 = build_knn_graph(X, GraphConfig(k=3, sigma=1.4))
        H1, H2 = g1.H.toarray(), g2.H.toarray()
        mask = H1 > 0
        assert np.all(H2[mask] >= H1[mask])

    def test_degrees_positive(self):
        rng = np.random.default_rng(5)
        g = build_knn_graph(rng.normal(size=(20, 2)), GraphConfig(k=1, sigma=1.0))
        assert np.all(g.degrees > 0)


class TestNormalizeSimilarity:
    def test_two_node_identity(self):
        H = np.array([[0.0, 1.0], [1.0, 0.0]])
        S = normalize_similarity(H, H.sum(axis=1)).toarray()
        np.testing.assert_array_equal(S, H)

    def test_three_node_star(self):
        H = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        S = normalize_similarity(H, H.sum(axis=1)).toarray()
        assert S[0, 1] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)
        assert S[0, 2] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)

    def test_formula_oracle(self):
        rng = np.random.default_rng(6)
        H = rng.random((15, 15)) * (rng.random((15, 15)) < 0.3)
        H = np.triu(H, 1)
        H = H + H.T
        H[0, 1] = H[1, 0] = 0.5  # keep every node connected
        for i in range(15):
            if H[i].sum() == 0:
                H[i, (i + 1) % 15] = H[(i + 1) % 15, i] = 0.25
        D = H.sum(axis=1)
        S = normalize_similarity(H, D).toarray()
        recovered = S * np.sqrt(np.outer(D, D))
        assert np.max(np.abs(recovered - H)) <= 1e-12

    def test_zero_degree_names_node(self):
        H = np.zeros((3, 3))
        H[0, 1] = H[1, 0] = 1.0
        with pytest.raises(ValueError, match="node 3"):
            normalize_similarity(H, H.sum(axis=1))


def test_dump_edges_format():
    X = np.array([[0.0], [1.0], [2.0]])
    g = build_knn_graph(X, GraphConfig(k=1, sigma=1.0))
    text = dump_edges(g)
    lines = text.strip().splitlines()
    assert lines[0].startswith("1 2 ")
    for line in lines:
        i, j, w = line.split()
        assert int(i) < int(j)
        assert float(w) > 0.0
