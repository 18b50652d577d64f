"""k-NN similarity graphs with Gaussian edge weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.spatial.distance import pdist, squareform


@dataclass(frozen=True)
class GraphConfig:
    """Graph construction knobs.

    ``sigma=None`` selects the median heuristic: subsample up to
    ``sigma_sample_cap`` points (seeded, without replacement) and set sigma
    to half the median pairwise distance among them.
    """

    k: int = 5
    sigma: float | None = None
    sigma_sample_cap: int = 1000
    sigma_seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k >= 1 required")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("fixed sigma must be > 0")
        if self.sigma_sample_cap < 2:
            raise ValueError("sigma_sample_cap >= 2 required")


@dataclass(frozen=True)
class SimilarityGraph:
    """Symmetric weighted k-NN graph over n samples.

    ``H`` holds Gaussian edge weights exp(-dist^2 / (2 sigma^2)) with a zero
    diagonal, ``degrees`` its row sums, and ``S`` the degree-normalized
    similarity H_ij / sqrt(D_ii D_jj). Both matrices are exactly symmetric.
    """

    n: int
    H: sparse.csr_matrix
    degrees: np.ndarray
    S: sparse.csr_matrix
    sigma: float
    k: int


def estimate_sigma(X, config: GraphConfig = GraphConfig()) -> float:
    """Half the median pairwise distance of a seeded subsample."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 samples to estimate sigma")
    rng = np.random.default_rng(config.sigma_seed)
    take = min(n, config.sigma_sample_cap)
    idx = rng.choice(n, size=take, replace=False)
    median = float(np.median(pdist(X[idx])))
    if median == 0.0:
        raise ValueError("zero median distance")
    return median / 2.0


def build_knn_graph(X, config: GraphConfig = GraphConfig()) -> SimilarityGraph:
    """Build the symmetrized k-NN graph with Gaussian weights.

    The directed k-NN relation uses Euclidean distance with self excluded and
    distance ties broken by smaller index; the edge set keeps (i, j) if either
    endpoint selects the other. Brute-force O(n^2) neighbor search.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D (n, d) array")
    n = X.shape[0]
    k = config.k
    if n < k + 1:
        raise ValueError(f"need at least k+1={k + 1} samples, got {n}")
    sigma = config.sigma if config.sigma is not None else estimate_sigma(X, config)
    d2 = squareform(pdist(X, "sqeuclidean"))
    np.fill_diagonal(d2, np.inf)
    # k-th smallest per row via partition (selection stays O(n^2) overall);
    # rows with distance ties at the boundary are trimmed to the smaller
    # indices so the graph is deterministic
    kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
    adj = d2 <= kth[:, None]
    for i in np.flatnonzero(adj.sum(axis=1) != k):
        cand = np.flatnonzero(adj[i])
        keep = cand[np.lexsort((cand, d2[i, cand]))][:k]
        adj[i] = False
        adj[i, keep] = True
    np.fill_diagonal(d2, 0.0)
    adj |= adj.T
    rows, cols = np.nonzero(adj)
    vals = np.exp(-d2[rows, cols] / (2.0 * sigma * sigma))
    H = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    degrees = np.asarray(H.sum(axis=1)).ravel()
    S = normalize_similarity(H, degrees)
    return SimilarityGraph(n=n, H=H, degrees=degrees, S=S, sigma=float(sigma), k=k)


def normalize_similarity(H, degrees) -> sparse.csr_matrix:
    """S_ij = H_ij / sqrt(D_ii D_jj), mirrored so S is exactly symmetric."""
    degrees = np.asarray(degrees, dtype=float).ravel()
    bad = np.flatnonzero(~(degrees > 0))
    if bad.size:
        raise ValueError(f"node {bad[0] + 1} has zero degree")
    dinv = sparse.diags(1.0 / np.sqrt(degrees))
    raw = (dinv @ sparse.csr_matrix(H) @ dinv).tocsr()
    upper = sparse.triu(raw, k=1)
    S = (upper + upper.T + sparse.diags(raw.diagonal())).tocsr()
    S.eliminate_zeros()
    return S


def dump_edges(graph) -> str:
    """Edge list ``i j H_ij`` (1-based, i < j, lexicographic) for fixture diffing."""
    H = graph.H if isinstance(graph, SimilarityGraph) else sparse.csr_matrix(graph)
    coo = sparse.triu(H, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[t] + 1} {coo.col[t] + 1} {float(coo.data[t])!r}" for t in order
    ]
    return "\n".join(lines) + ("\n" if lines else "")
