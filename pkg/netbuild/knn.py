import logging
import math
from typing import Tuple

import numpy as np
from scipy.spatial.distance import cdist

from numerics.autodiff import as_matrix

logger = logging.getLogger(__name__)

# Smallest positive confidence; exp(-d) underflows to 0 beyond d ~ 745
MIN_CONFIDENCE = float(np.finfo(np.float64).tiny)


def pairwise_distances(features: np.ndarray) -> np.ndarray:
    """Euclidean distance between every pair of feature rows."""
    return cdist(features, features, metric="euclidean")


def _select_neighbors(distances: np.ndarray, k: int) -> Tuple[np.ndarray, ...]:
    n = distances.shape[0]
    if not 1 <= k < n:
        raise ValueError(
            f"KNN needs 1 <= k < n, got k={k} for n={n} nodes")
    ranked = distances.copy()
    np.fill_diagonal(ranked, np.inf)
    # Stable sort: equal distances keep ascending index order
    order = np.argsort(ranked, axis=1, kind="stable")[:, :k]
    return tuple(np.sort(row) for row in order)


def knn_neighbors(features, k: int) -> Tuple[np.ndarray, ...]:
    """
    The k nearest distinct other nodes of every node.

    :param features: n x f matrix, one feature row per node.
    :param k: Number of neighbors, 1 <= k < n.
    :return: One ascending index array per node.
    """
    features = as_matrix(features, "features")
    return _select_neighbors(pairwise_distances(features), k)


def build_adjacency(features, k: int, binary_edges: bool = False) -> np.ndarray:
    """
    KNN adjacency with edge confidences exp(-distance).

    An edge (i, j) exists when either endpoint selected the other. With
    `binary_edges` every kept edge gets confidence 1. Confidences never drop
    below `MIN_CONFIDENCE`, so far-apart neighbors keep their edge.
    """
    features = as_matrix(features, "features")
    distances = pairwise_distances(features)
    neighbors = _select_neighbors(distances, k)

    n = features.shape[0]
    adjacency = np.zeros((n, n))
    for i, selected in enumerate(neighbors):
        for j in selected:
            weight = 1.0 if binary_edges else max(
                math.exp(-distances[i, j]), MIN_CONFIDENCE)
            adjacency[i, j] = weight
            adjacency[j, i] = weight
    adjacency.setflags(write=False)
    return adjacency


def normalize(adjacency) -> np.ndarray:
    """
    D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.

    Row sums use exactly rounded summation so relabeling nodes permutes
    the result without changing any value.
    """
    adjacency = as_matrix(adjacency, "adjacency")
    n, cols = adjacency.shape
    if n != cols:
        raise ValueError(f"adjacency must be square, got {adjacency.shape}")
    if (adjacency < 0).any():
        raise ValueError("adjacency entries must be nonnegative")
    if not np.array_equal(adjacency, adjacency.T):
        raise ValueError("adjacency must be symmetric")

    with_loops = adjacency + np.eye(n)
    degree = np.array([math.fsum(row) for row in with_loops])
    normalized = with_loops / np.sqrt(np.outer(degree, degree))
    normalized.setflags(write=False)
    return normalized
