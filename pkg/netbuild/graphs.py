import logging
from dataclasses import dataclass
from typing import Generic, Iterable, List, Tuple, TypeVar

import numpy as np

from netbuild.knn import build_adjacency, normalize
from numerics.autodiff import as_matrix

logger = logging.getLogger(__name__)

INPUT_MODES = ("normalized", "raw", "degree")

T = TypeVar("T")


@dataclass(frozen=True)
class WeightedGraph:
    """One subject: raw weighted matrix W and its class label."""
    graph_id: str
    weights: np.ndarray
    label: int

    def __post_init__(self) -> None:
        weights = as_matrix(self.weights, f"weights of '{self.graph_id}'")
        if weights.shape[0] != weights.shape[1]:
            raise ValueError(
                f"Graph '{self.graph_id}' weight matrix must be square, "
                f"got {weights.shape}")
        if int(self.label) != self.label or self.label < 0:
            raise ValueError(
                f"Graph '{self.graph_id}' label must be a class index, "
                f"got {self.label}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "label", int(self.label))

    @property
    def num_nodes(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class BuiltGraph:
    """
    A subject after network building.

    `adjacency` is the KNN adjacency A, `normalized` is Ahat and `features`
    is F0 = W. `aggregation` is the matrix the GNN aggregates with (and the
    policy observes): Ahat, W or the scaled degree matrix depending on the
    input mode. `attention_mask` marks, per row, the nodes a GAT layer may
    attend to.
    """
    graph_id: str
    label: int
    adjacency: np.ndarray
    normalized: np.ndarray
    features: np.ndarray
    neighbors: Tuple[Tuple[int, ...], ...]
    aggregation: np.ndarray
    attention_mask: np.ndarray
    input_mode: str = "normalized"

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class Splits(Generic[T]):
    train: Tuple[T, ...]
    val: Tuple[T, ...]
    test: Tuple[T, ...]

    def all(self) -> Tuple[T, ...]:
        return self.train + self.val + self.test


@dataclass(frozen=True)
class GraphStatistics:
    graph_id: str
    density: float
    mean_degree: float
    mean_confidence: float


def aggregation_matrix(weights: np.ndarray, adjacency: np.ndarray,
                       normalized: np.ndarray, input_mode: str) -> np.ndarray:
    """Select the aggregation structure for an input mode."""
    if input_mode == "normalized":
        return normalized
    if input_mode == "raw":
        return weights
    if input_mode == "degree":
        degree = adjacency.sum(axis=1) + 1.0
        scaled = np.diag(degree / degree.max())
        scaled.setflags(write=False)
        return scaled
    raise ValueError(
        f"Invalid input mode: {input_mode}. "
        f"Valid modes are: {', '.join(INPUT_MODES)}")


def build_graph(graph: WeightedGraph, k: int, input_mode: str = "normalized",
                binary_edges: bool = False) -> BuiltGraph:
    """Run network building on one subject."""
    features = graph.weights
    adjacency = build_adjacency(features, k, binary_edges=binary_edges)
    normalized = normalize(adjacency)
    aggregation = aggregation_matrix(
        features, adjacency, normalized, input_mode)

    # Attention covers the off-diagonal support plus the node itself
    mask = aggregation != 0.0
    np.fill_diagonal(mask, True)
    mask.setflags(write=False)

    neighbors = tuple(
        tuple(int(j) for j in np.flatnonzero(row)) for row in adjacency)
    return BuiltGraph(
        graph_id=graph.graph_id,
        label=graph.label,
        adjacency=adjacency,
        normalized=normalized,
        features=features,
        neighbors=neighbors,
        aggregation=aggregation,
        attention_mask=mask,
        input_mode=input_mode,
    )


def check_same_size(graphs: Iterable[WeightedGraph]) -> int:
    """Return the common node count, rejecting mixed sizes."""
    sizes = {graph.num_nodes for graph in graphs}
    if not sizes:
        raise ValueError("Dataset is empty")
    if len(sizes) > 1:
        raise ValueError(
            f"All graphs must have the same number of nodes, "
            f"found sizes {sorted(sizes)}")
    return sizes.pop()


def build_splits(splits: Splits, k: int, input_mode: str = "normalized",
                 binary_edges: bool = False) -> Splits:
    check_same_size(splits.all())

    def build(part):
        return tuple(
            build_graph(g, k, input_mode, binary_edges) for g in part)

    built = Splits(train=build(splits.train), val=build(splits.val),
                   test=build(splits.test))
    logger.info(
        f"Built {len(splits.all())} graphs with k={k}, "
        f"input mode '{input_mode}'")
    return built


def graph_statistics(graph: BuiltGraph) -> GraphStatistics:
    """Density, mean degree and mean edge confidence of the aggregation."""
    n = graph.num_nodes
    off_diagonal = ~np.eye(n, dtype=bool)
    support = (graph.aggregation != 0.0) & off_diagonal
    edges = graph.adjacency[graph.adjacency > 0.0]
    return GraphStatistics(
        graph_id=graph.graph_id,
        density=float(support.sum()) / (n * (n - 1)) if n > 1 else 0.0,
        mean_degree=float(support.sum(axis=1).mean()),
        mean_confidence=float(edges.mean()) if edges.size else 0.0,
    )


def summarize_statistics(stats: List[GraphStatistics]) -> dict:
    return {
        "graphs": len(stats),
        "density": float(np.mean([s.density for s in stats])),
        "mean_degree": float(np.mean([s.mean_degree for s in stats])),
        "mean_confidence": float(np.mean([s.mean_confidence for s in stats])),
    }
