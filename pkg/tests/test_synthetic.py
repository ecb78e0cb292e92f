import numpy as np
import pytest

from experiments.synthetic import (SyntheticSpec, add_one_hop_signal,
                                   add_two_hop_signal, community_template,
                                   generate_synthetic, pooled_weights,
                                   probe_error, probe_features)
from netbuild.knn import build_adjacency


@pytest.mark.parametrize("p2, depths", [(0.0, {1}), (1.0, {2})])
def test_p2_extremes_fix_every_depth(p2, depths):
    dataset = generate_synthetic(SyntheticSpec(m=20, n=10, k=3, p2=p2))
    assert set(dataset.depths.values()) == depths


@pytest.mark.parametrize("m", [20, 21, 40])
def test_labels_and_groups_are_balanced(m):
    dataset = generate_synthetic(SyntheticSpec(m=m, n=10, k=3, p2=0.5))
    labels = [g.label for g in dataset.graphs]
    assert abs(labels.count(0) - labels.count(1)) <= 1
    for label in (0, 1):
        group = [dataset.depth_of(g.graph_id) for g in dataset.graphs
                 if g.label == label]
        assert abs(group.count(1) - group.count(2)) <= 1


def test_generation_is_seeded():
    spec = SyntheticSpec(m=20, n=10, k=3, seed=4)
    first, second = generate_synthetic(spec), generate_synthetic(spec)
    assert first.depths == second.depths
    for a, b in zip(first.graphs, second.graphs):
        assert a.graph_id == b.graph_id
        assert np.array_equal(a.weights, b.weights)


def test_ids_are_zero_padded():
    dataset = generate_synthetic(SyntheticSpec(m=20, n=10, k=3))
    assert dataset.graphs[0].graph_id == "syn00"
    assert dataset.graphs[-1].graph_id == "syn19"


@pytest.mark.parametrize("overrides", [
    {"m": 10}, {"n": 5}, {"k": 30}, {"p2": 1.5}, {"noise": -0.1},
    {"signal": 0.0},
])
def test_invalid_specs_are_rejected(overrides):
    with pytest.raises(ValueError):
        SyntheticSpec(**overrides)


def test_signals_keep_the_knn_graph(rng):
    weights = community_template(12, rng)
    adjacency = build_adjacency(weights, 4)
    np.testing.assert_allclose(
        build_adjacency(add_one_hop_signal(weights, 0.5), 4), adjacency,
        atol=1e-12)
    np.testing.assert_allclose(
        build_adjacency(add_two_hop_signal(weights, 4), 4), adjacency,
        atol=1e-12)


def test_two_hop_signal_is_invisible_at_depth_one(rng):
    weights = community_template(12, rng)
    reflected = add_two_hop_signal(weights, 4)
    w1 = pooled_weights(weights, 4)
    np.testing.assert_allclose(w1 @ reflected, w1 @ weights, atol=1e-12)
    assert not np.allclose(reflected, weights)


def test_probe_features_depth_zero_is_the_column_mean(tiny_dataset):
    graph = tiny_dataset.graphs[0]
    np.testing.assert_array_equal(
        probe_features(graph, 0, 3), graph.weights.mean(axis=0))
    with pytest.raises(ValueError):
        probe_features(graph, -1, 3)


def test_probe_sees_the_two_hop_group_only_at_depth_two():
    dataset = generate_synthetic(
        SyntheticSpec(m=40, n=12, k=4, p2=0.5, noise=0.0, seed=0))
    assert probe_error(dataset, depth=2) == 0.0
    assert probe_error(dataset, depth=1, group=2) >= 0.3


def test_probe_rejects_an_empty_group():
    dataset = generate_synthetic(SyntheticSpec(m=20, n=10, k=3, p2=0.0))
    with pytest.raises(ValueError, match="best depth 2"):
        probe_error(dataset, depth=1, group=2)
