import logging
from collections import defaultdict
from typing import List, Sequence

import numpy as np

from netbuild.graphs import Splits, WeightedGraph

logger = logging.getLogger(__name__)

MIN_DATASET = 10
MIN_CLASS = 3


def split(graphs: Sequence[WeightedGraph], seed: int) -> Splits:
    """
    Stratified 8:1:1 train/validation/test partition.

    Each class gives max(1, round(10%)) instances to validation and to
    test and the rest to training. Each part keeps the dataset's id order.
    """
    if len(graphs) < MIN_DATASET:
        raise ValueError(
            f"Splitting needs at least {MIN_DATASET} instances, "
            f"got {len(graphs)}")
    ids = [g.graph_id for g in graphs]
    if len(set(ids)) != len(ids):
        raise ValueError("Graph ids must be unique")

    by_class = defaultdict(list)
    for position, graph in enumerate(graphs):
        by_class[graph.label].append(position)

    rng = np.random.default_rng(seed)
    parts: List[List[int]] = [[], [], []]
    for label in sorted(by_class):
        members = by_class[label]
        if len(members) < MIN_CLASS:
            raise ValueError(
                f"Class {label} has {len(members)} instances; stratified "
                f"splitting needs at least {MIN_CLASS}")
        shuffled = [members[i] for i in rng.permutation(len(members))]
        held_out = max(1, int(round(0.1 * len(members))))
        parts[1] += shuffled[:held_out]
        parts[2] += shuffled[held_out:2 * held_out]
        parts[0] += shuffled[2 * held_out:]

    train, val, test = (tuple(graphs[i] for i in sorted(p)) for p in parts)
    logger.info(
        f"Split {len(graphs)} graphs into {len(train)}/{len(val)}/"
        f"{len(test)} (seed {seed})")
    return Splits(train=train, val=val, test=test)
