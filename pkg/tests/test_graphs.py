import numpy as np
import pytest

from netbuild.graphs import (Splits, WeightedGraph, build_graph, build_splits,
                             check_same_size, graph_statistics,
                             summarize_statistics)
from netbuild.knn import build_adjacency, normalize

from conftest import random_graph, random_weights


def test_weighted_graph_validation():
    with pytest.raises(ValueError, match="square"):
        WeightedGraph("g", np.ones((2, 3)), 0)
    with pytest.raises(ValueError, match="label"):
        WeightedGraph("g", np.ones((2, 2)), -1)


def test_normalized_mode_aggregates_with_ahat(rng):
    graph = random_graph(rng, 8)
    built = build_graph(graph, k=3)
    expected = normalize(build_adjacency(graph.weights, 3))
    assert np.array_equal(built.normalized, expected)
    assert built.aggregation is built.normalized
    assert built.features is graph.weights


def test_raw_mode_aggregates_with_weights(rng):
    graph = random_graph(rng, 8)
    built = build_graph(graph, k=3, input_mode="raw")
    assert np.array_equal(built.aggregation, graph.weights)


def test_degree_mode_is_scaled_diagonal(rng):
    built = build_graph(random_graph(rng, 8), k=3, input_mode="degree")
    diagonal = np.diag(built.aggregation)
    assert np.array_equal(built.aggregation, np.diag(diagonal))
    assert diagonal.max() == 1.0
    assert built.attention_mask.sum() == 8


def test_unknown_input_mode_lists_valid_modes(rng):
    with pytest.raises(ValueError, match="normalized, raw, degree"):
        build_graph(random_graph(rng, 8), k=3, input_mode="laplacian")


def test_attention_mask_covers_neighbors_and_self(rng):
    built = build_graph(random_graph(rng, 8), k=3)
    assert np.all(np.diag(built.attention_mask))
    assert np.array_equal(built.attention_mask, built.normalized > 0)
    for i, row in enumerate(built.neighbors):
        assert len(row) >= 3
        assert i not in row


def test_mixed_sizes_are_rejected(rng):
    graphs = [random_graph(rng, 6, "a"), random_graph(rng, 7, "b")]
    with pytest.raises(ValueError, match=r"\[6, 7\]"):
        check_same_size(graphs)


def test_build_splits_keeps_partition(rng):
    graphs = [WeightedGraph(f"g{i}", random_weights(rng, 6), i % 2)
              for i in range(6)]
    splits = Splits(train=tuple(graphs[:4]), val=(graphs[4],),
                    test=(graphs[5],))
    built = build_splits(splits, k=2)
    assert [g.graph_id for g in built.all()] == [g.graph_id for g in graphs]


def test_graph_statistics(rng):
    built = build_graph(random_graph(rng, 8), k=3)
    stats = graph_statistics(built)
    assert 0.0 < stats.density <= 1.0
    assert stats.mean_degree >= 3
    assert 0.0 < stats.mean_confidence <= 1.0
    raw = graph_statistics(
        build_graph(random_graph(rng, 8), k=3, input_mode="raw"))
    assert raw.density == 1.0
    summary = summarize_statistics([stats, raw])
    assert summary["graphs"] == 2
