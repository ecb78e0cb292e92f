import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.sparse.csgraph import shortest_path

from netbuild.graphs import WeightedGraph, check_same_size
from netbuild.knn import build_adjacency

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubjectGraph:
    """
    Coarse graph whose nodes are whole subjects.

    Built with the same KNN procedure as instance graphs, on each
    subject's flattened weight matrix.
    """
    subject_ids: Tuple[str, ...]
    adjacency: np.ndarray
    hop_distance: np.ndarray

    @property
    def num_subjects(self) -> int:
        return len(self.subject_ids)

    @property
    def index(self) -> Dict[str, int]:
        return {sid: i for i, sid in enumerate(self.subject_ids)}

    def hop_neighbors(self, subject_id: str, hops: int) -> Tuple[str, ...]:
        """Subjects at breadth-first distance exactly `hops`."""
        try:
            row = self.hop_distance[self.index[subject_id]]
        except KeyError as e:
            raise ValueError(
                f"Subject '{subject_id}' is not part of the subject graph") from e
        return tuple(
            self.subject_ids[j] for j in np.flatnonzero(row == hops))


def build_subject_graph(graphs: Sequence[WeightedGraph], k: int) -> SubjectGraph:
    """
    :param graphs: Training and validation subjects only.
    :param k: KNN neighbors; capped at m - 1 for small subject sets.
    """
    if not graphs:
        raise ValueError("Cannot build a subject graph from an empty dataset")
    check_same_size(graphs)
    m = len(graphs)
    if m < 2:
        raise ValueError(
            f"A subject graph needs at least 2 subjects, got {m}")
    if k >= m:
        logger.warning(
            f"Subject graph k={k} exceeds m-1={m - 1}; using k={m - 1}")
        k = m - 1

    features = np.stack([g.weights.reshape(-1) for g in graphs])
    adjacency = build_adjacency(features, k)
    # Hops follow the KNN skeleton; exp(-d) may underflow for distant subjects
    skeleton = build_adjacency(features, k, binary_edges=True)
    hop_distance = shortest_path(
        skeleton, method="D", directed=False, unweighted=True)
    hop_distance.setflags(write=False)

    logger.info(
        f"Built subject graph over {m} subjects with k={k}, "
        f"{int(skeleton.sum()) // 2} edges")
    return SubjectGraph(
        subject_ids=tuple(g.graph_id for g in graphs),
        adjacency=adjacency,
        hop_distance=hop_distance,
    )
