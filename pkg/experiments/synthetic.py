import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from netbuild.graphs import WeightedGraph
from netbuild.knn import build_adjacency, normalize

logger = logging.getLogger(__name__)

PROBE_RIDGE = 1e-8


@dataclass(frozen=True)
class SyntheticSpec:
    """
    A depth-mixture dataset.

    A fraction `p2` of each class carries its class signal in 2-hop
    structure only; the rest carry it in 1-hop structure.
    """
    m: int = 200
    n: int = 30
    p2: float = 0.5
    noise: float = 0.05
    signal: float = 0.5
    k: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.m < 20:
            raise ValueError(f"Synthetic datasets need m >= 20, got {self.m}")
        if self.n < 10:
            raise ValueError(f"Synthetic datasets need n >= 10, got {self.n}")
        if not 1 <= self.k < self.n:
            raise ValueError(
                f"k must be in [1, n), got k={self.k} for n={self.n}")
        if not 0.0 <= self.p2 <= 1.0:
            raise ValueError(f"p2 must be in [0, 1], got {self.p2}")
        if self.noise < 0.0 or self.signal <= 0.0:
            raise ValueError(
                f"Need noise >= 0 and signal > 0, got noise={self.noise}, "
                f"signal={self.signal}")


@dataclass(frozen=True)
class SyntheticDataset:
    spec: SyntheticSpec
    graphs: List[WeightedGraph]
    depths: Dict[str, int]

    def depth_of(self, graph_id: str) -> int:
        return self.depths[graph_id]


def community_template(n: int, rng: np.random.Generator) -> np.ndarray:
    """Three communities of unequal size with jittered strengths."""
    sizes = [n // 2, n // 3]
    sizes.append(n - sum(sizes))
    community = np.repeat(np.arange(3), sizes)
    same = community[:, None] == community[None, :]
    template = np.where(same, 0.8, 0.1)
    jitter = rng.uniform(0.0, 0.1, size=(n, n))
    return template + (jitter + jitter.T) / 2.0


def pooled_weights(weights: np.ndarray, k: int) -> np.ndarray:
    """Per-node weight of depth-1 mean pooling, Ahat^T 1 / n."""
    normalized = normalize(build_adjacency(weights, k))
    return normalized.sum(axis=0) / weights.shape[0]


def add_one_hop_signal(weights: np.ndarray, signal: float) -> np.ndarray:
    # Shifting whole columns moves every row by the same vector, so row
    # distances (and the KNN graph) are unchanged
    shifted = weights.copy()
    shifted[:, :weights.shape[0] // 2] += signal
    return shifted


def add_two_hop_signal(weights: np.ndarray, k: int) -> np.ndarray:
    """
    Reflect the second half of the columns about their pooled mean.

    Each column x becomes kappa - x with kappa chosen so the depth-1
    pooled aggregate of x is unchanged. Row distances are preserved, so
    the class signal only appears from the second aggregation on.
    """
    n = weights.shape[0]
    w1 = pooled_weights(weights, k)
    columns = weights[:, n // 2:]
    kappa = 2.0 * (w1 @ columns) / w1.sum()
    reflected = weights.copy()
    reflected[:, n // 2:] = kappa[None, :] - columns
    return reflected


def generate_synthetic(spec: SyntheticSpec) -> SyntheticDataset:
    """
    Generate a balanced binary dataset with known best depths.

    Class 0 instances are the shared template plus noise. Class 1
    instances add either a 1-hop signal (best depth 1) or a 2-hop signal
    (best depth 2); within each class a fraction `p2` belongs to the
    2-hop group.
    """
    rng = np.random.default_rng(spec.seed)
    template = community_template(spec.n, rng)

    labels = np.array([0] * (spec.m // 2) + [1] * (spec.m - spec.m // 2))
    two_hop = np.zeros(spec.m, dtype=bool)
    for label in (0, 1):
        members = np.flatnonzero(labels == label)
        count = int(round(spec.p2 * len(members)))
        two_hop[members[:count]] = True
    order = rng.permutation(spec.m)
    labels, two_hop = labels[order], two_hop[order]

    width = len(str(spec.m - 1))
    graphs, depths = [], {}
    for index in range(spec.m):
        noise = rng.normal(0.0, spec.noise, size=(spec.n, spec.n))
        weights = template + (noise + noise.T) / 2.0
        if labels[index] == 1:
            if two_hop[index]:
                weights = add_two_hop_signal(weights, spec.k)
            else:
                weights = add_one_hop_signal(weights, spec.signal)
        graph_id = f"syn{index:0{width}d}"
        graphs.append(WeightedGraph(graph_id, weights, int(labels[index])))
        depths[graph_id] = 2 if two_hop[index] else 1

    logger.info(
        f"Generated {spec.m} synthetic graphs (n={spec.n}, p2={spec.p2}, "
        f"noise={spec.noise}), {int(two_hop.sum())} in the 2-hop group")
    return SyntheticDataset(spec=spec, graphs=graphs, depths=depths)


def probe_features(graph: WeightedGraph, depth: int, k: int) -> np.ndarray:
    """Mean-pooled linear aggregation Ahat^depth W."""
    if depth < 0:
        raise ValueError(f"Probe depth must be >= 0, got {depth}")
    normalized = normalize(build_adjacency(graph.weights, k))
    hidden = graph.weights
    for _ in range(depth):
        hidden = normalized @ hidden
    return hidden.mean(axis=0)


def probe_error(dataset: SyntheticDataset, depth: int,
                group: Optional[int] = None) -> float:
    """
    Training error of a ridge least-squares probe on pooled features.

    :param group: Score only the instances whose best depth is `group`;
        all instances when None.
    """
    graphs = dataset.graphs
    features = np.stack(
        [probe_features(g, depth, dataset.spec.k) for g in graphs])
    design = np.hstack([features, np.ones((len(graphs), 1))])
    targets = np.array([g.label for g in graphs], dtype=np.float64)

    gram = design.T @ design + PROBE_RIDGE * np.eye(design.shape[1])
    coefficients = np.linalg.solve(gram, design.T @ targets)
    predicted = (design @ coefficients >= 0.5).astype(int)

    scored = np.array([
        group is None or dataset.depths[g.graph_id] == group for g in graphs])
    if not scored.any():
        raise ValueError(f"No instances with best depth {group}")
    errors = predicted[scored] != targets[scored].astype(int)
    return float(errors.mean())
