import logging
from typing import Sequence

import numpy as np

from netbuild.subject_graph import SubjectGraph

logger = logging.getLogger(__name__)


def transition(subject_graph: SubjectGraph, current_id: str, action: int,
               rng: np.random.Generator, train_ids: Sequence[str]) -> str:
    """
    Next state: a random training subject exactly `action` hops away.

    Validation subjects shape the hop distances but are never returned.
    When the frontier holds no training subject, any training subject is
    drawn uniformly.
    """
    if action < 1:
        raise ValueError(f"Actions start at 1, got {action}")
    if not train_ids:
        raise ValueError("Transition needs at least one training subject")
    allowed = set(train_ids)
    frontier = [
        sid for sid in subject_graph.hop_neighbors(current_id, action)
        if sid in allowed
    ]
    if frontier:
        return frontier[int(rng.integers(len(frontier)))]
    logger.debug(
        f"No training subject {action} hops from '{current_id}'; "
        f"falling back to a uniform draw")
    return train_ids[int(rng.integers(len(train_ids)))]
