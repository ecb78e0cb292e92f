import dataclasses

import numpy as np
import pytest

from experiments.pipeline import prepare_splits
from gnn.layers import predict
from mdp.run_config import run_seeds
from mdp.runlog import RunLog
from mdp.trainer import (build_model, evaluate, fixed_depth, greedy_depths,
                         random_depths, select_best_epoch, train_with_depths)

from conftest import ConstantPolicy


@pytest.fixture
def built(tiny_config, tiny_dataset):
    seeds = run_seeds(tiny_config.seed)
    return prepare_splits(tiny_config, tiny_dataset.graphs, seeds,
                          with_subject_graph=False).built


@pytest.mark.parametrize("curve, epoch", [
    ([0.5, 0.7, 0.6], 2),
    ([0.6, 0.6, 0.5], 1),
    ([0.1], 1),
    ([], 0),
])
def test_best_epoch_is_first_maximum(curve, epoch):
    assert select_best_epoch(curve) == epoch


def test_accuracy_extremes(tiny_config, built):
    model = build_model(tiny_config, 10, 3, seed=1)
    graphs = list(built.val + built.test)
    predicted = [predict(model, g, 1).label for g in graphs]
    right = [dataclasses.replace(g, label=p) for g, p in zip(graphs, predicted)]
    wrong = [dataclasses.replace(g, label=1 - p)
             for g, p in zip(graphs, predicted)]
    assert evaluate(model, right, [1] * len(graphs)).accuracy == 1.0
    assert evaluate(model, wrong, [1] * len(graphs)).accuracy == 0.0


def test_depth_histogram_and_predictions(tiny_config, built):
    model = build_model(tiny_config, 10, 3, seed=1)
    graphs = list(built.val + built.test)
    result = evaluate(model, graphs, [1, 2, 3, 1])
    assert result.depth_histogram == {1: 2, 2: 1, 3: 1}
    assert sum(result.depth_histogram.values()) == len(graphs)
    assert [p.depth for p in result.predictions] == [1, 2, 3, 1]
    assert [p.graph_id for p in result.predictions] == [
        g.graph_id for g in graphs]
    assert result.to_record()["depth_histogram"] == {"1": 2, "2": 1, "3": 1}


def test_single_class_split_has_no_auc(tiny_config, built):
    model = build_model(tiny_config, 10, 3, seed=1)
    graphs = [g for g in built.train if g.label == 0][:3]
    result = evaluate(model, graphs, [1, 1, 1])
    assert result.auc is None


def test_evaluate_rejects_bad_input(tiny_config, built):
    model = build_model(tiny_config, 10, 3, seed=1)
    with pytest.raises(ValueError, match="empty"):
        evaluate(model, [], [])
    with pytest.raises(ValueError, match="depths"):
        evaluate(model, list(built.val), [1])


def test_zero_epochs_keeps_the_untrained_model(tiny_config, built):
    config = tiny_config.with_overrides(epochs=0)
    result = train_with_depths(config, built, fixed_depth(2), max_depth=2,
                               model_seed=5, train_seed=6, depth_seed=7)
    fresh = build_model(config, 10, 2, seed=5)
    assert result.best_epoch == 0
    assert result.validation_curve == []
    for name, value in fresh.parameters.items():
        assert np.array_equal(result.model.parameters[name], value)


def test_training_logs_every_epoch(tiny_config, built):
    run_log = RunLog()
    result = train_with_depths(tiny_config, built, fixed_depth(1),
                               max_depth=1, model_seed=5, train_seed=6,
                               depth_seed=7, phase="probe", run_log=run_log)
    assert len(result.validation_curve) == tiny_config.epochs
    assert result.best_epoch == select_best_epoch(result.validation_curve)
    assert [(e.phase, e.epoch) for e in run_log.epochs] == [
        ("probe", 1), ("probe", 2)]
    assert result.validation.accuracy == max(result.validation_curve)


def test_training_is_seed_deterministic(tiny_config, built):
    def run():
        return train_with_depths(tiny_config, built, random_depths(3),
                                 max_depth=3, model_seed=1, train_seed=2,
                                 depth_seed=3)

    first, second = run(), run()
    assert first.test.predictions == second.test.predictions
    assert first.validation_curve == second.validation_curve


def test_random_depths(built):
    rng = np.random.default_rng(0)
    graph = built.train[0]
    per_epoch = random_depths(3)
    assert {per_epoch(graph, e, rng) for e in range(60)} == {1, 2, 3}
    per_instance = random_depths(3, per_instance=True)
    assert len({per_instance(graph, e, rng) for e in range(60)}) == 1
    assert {random_depths(1)(graph, 1, rng) for _ in range(10)} == {1}


def test_greedy_depths_follow_the_policy(built):
    policy = greedy_depths(ConstantPolicy([0.0, 2.0, 1.0]), "flattened")
    assert {policy(g, 0, None) for g in built.all()} == {2}
