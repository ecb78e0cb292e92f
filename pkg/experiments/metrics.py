from typing import Sequence, Tuple

import numpy as np
from scipy.stats import rankdata


def accuracy(predicted: Sequence[int], labels: Sequence[int]) -> float:
    if len(predicted) != len(labels):
        raise ValueError(
            f"Got {len(predicted)} predictions for {len(labels)} labels")
    if not labels:
        raise ValueError("Accuracy of an empty split is undefined")
    correct = sum(int(p == y) for p, y in zip(predicted, labels))
    return correct / len(labels)


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """
    Rank (Mann-Whitney) AUC: the fraction of positive/negative pairs whose
    positive score is higher, ties counted as one half.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ValueError(
            f"Got {scores.size} scores for {labels.size} labels")
    positives = int((labels == 1).sum())
    negatives = int((labels == 0).sum())
    if positives + negatives != labels.size:
        raise ValueError("AUC labels must be 0 or 1")
    if positives == 0 or negatives == 0:
        raise ValueError(
            "AUC needs at least one positive and one negative sample")

    # Average ranks handle ties
    ranks = rankdata(scores, method="average")
    u_statistic = ranks[labels == 1].sum() - positives * (positives + 1) / 2
    return float(u_statistic / (positives * negatives))


def mean_std(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and population standard deviation."""
    if not values:
        raise ValueError("mean_std needs at least one value")
    array = np.asarray(values, dtype=np.float64)
    return float(array.mean()), float(array.std())


def format_mean_std(values: Sequence[float]) -> str:
    mean, std = mean_std(values)
    return f"{mean:.3f}±{std:.3f}"
