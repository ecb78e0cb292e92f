import pytest
from hypothesis import given
from hypothesis import strategies as st

from experiments.metrics import accuracy, auc, format_mean_std, mean_std


def brute_force_auc(scores, labels):
    positives = [s for s, y in zip(scores, labels) if y == 1]
    negatives = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if p > q else 0.5 if p == q else 0.0
               for p in positives for q in negatives)
    return wins / (len(positives) * len(negatives))


def test_auc_fixture():
    assert auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75


def test_auc_extremes():
    assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
    assert auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5


@pytest.mark.parametrize("labels", [[1, 1, 1], [0, 0, 0]])
def test_auc_needs_both_classes(labels):
    with pytest.raises(ValueError, match="positive and one negative"):
        auc([0.1, 0.2, 0.3], labels)


@given(st.lists(
    st.tuples(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]),
              st.integers(min_value=0, max_value=1)),
    min_size=2, max_size=30).filter(
        lambda pairs: len({y for _, y in pairs}) == 2))
def test_auc_matches_pair_counting(pairs):
    scores = [s for s, _ in pairs]
    labels = [y for _, y in pairs]
    assert auc(scores, labels) == brute_force_auc(scores, labels)


def test_accuracy():
    assert accuracy([1, 0, 1, 1], [1, 1, 1, 0]) == 0.5
    with pytest.raises(ValueError):
        accuracy([], [])
    with pytest.raises(ValueError):
        accuracy([1], [1, 0])


def test_mean_std_is_population():
    assert mean_std([1.0, 3.0]) == (2.0, 1.0)
    assert format_mean_std([0.5, 0.5, 0.5]) == "0.500±0.000"
    with pytest.raises(ValueError):
        mean_std([])
