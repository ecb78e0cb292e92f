import json
import os

import pytest

from config.config import OUTPUT_PATHS_FILE
from config.path_builder import PathBuilder
from experiments.pipeline import (depth_agreement, evaluate_checkpoints,
                                  run_pipeline, write_results)
from mdp.trainer import InstancePrediction


def read(path):
    with open(path) as file:
        return file.read()


@pytest.fixture
def two_runs(tiny_config, tiny_dataset, tmp_path):
    outputs = []
    for name in ("first", "second"):
        paths = PathBuilder(str(tmp_path), name, OUTPUT_PATHS_FILE)
        result = run_pipeline(tiny_config, tiny_dataset.graphs,
                              tiny_dataset.depths, paths)
        write_results(paths.get_output_path("results", "records"),
                      [result.to_record()])
        outputs.append((paths, result))
    return outputs


def test_runs_are_byte_identical(two_runs):
    (first, _), (second, _) = two_runs
    for keys in (("results", "records"), ("logs", "run_log"),
                 ("checkpoints", "policy"), ("checkpoints", "gnn2")):
        assert read(first.get_output_path(*keys)) == read(
            second.get_output_path(*keys))


def test_run_log_ends_with_the_final_metrics(two_runs, tiny_config):
    paths, result = two_runs[0]
    lines = read(paths.get_output_path("logs", "run_log")).splitlines()
    records = [json.loads(line) for line in lines]
    kinds = [r["record"] for r in records]
    assert kinds.count("timestep") == tiny_config.timesteps
    assert kinds.count("epoch") == tiny_config.epochs
    assert kinds[-1] == "final"
    assert records[-1]["test_accuracy"] == result.test.accuracy
    assert "config" not in records[-1]


def test_result_record(two_runs, tiny_config):
    _, result = two_runs[0]
    record = result.to_record()
    assert record["kind"] == "bn-gcn"
    assert record["seed"] == tiny_config.seed
    assert record["config"] == tiny_config.to_dict()
    assert 0.0 <= record["depth_agreement"] <= 1.0
    assert sum(record["depth_histogram"].values()) == len(
        result.test.predictions)
    assert set(record["val_depth_histogram"]) <= {"1", "2", "3"}


def test_checkpoints_reproduce_the_test_metrics(two_runs, tiny_config,
                                                tiny_dataset):
    paths, result = two_runs[0]
    rescored = evaluate_checkpoints(
        tiny_config, tiny_dataset.graphs,
        paths.get_output_path("checkpoints", "policy"),
        paths.get_output_path("checkpoints", "gnn2"))
    assert rescored.predictions == result.test.predictions
    assert rescored.accuracy == result.test.accuracy


def test_depth_agreement():
    predictions = [
        InstancePrediction("a", 0, 0, 0.1, 1),
        InstancePrediction("b", 1, 1, 0.9, 2),
        InstancePrediction("c", 1, 0, 0.4, 1),
        InstancePrediction("d", 0, 0, 0.2, 2),
    ]
    truth = {"a": 1, "b": 2, "c": 2, "d": 1}
    assert depth_agreement(predictions, truth) == 0.5
    with pytest.raises(ValueError):
        depth_agreement([], truth)


def test_write_results_sorts_keys(tmp_path):
    path = os.path.join(tmp_path, "out", "results.jsonl")
    write_results(path, [{"b": 1, "a": None}])
    assert read(path) == '{"a": null, "b": 1}\n'
