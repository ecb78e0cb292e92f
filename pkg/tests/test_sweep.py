import pytest

from experiments.sweep import (SweepRow, SweepSpec, run_mode_ablation,
                               run_repetitions, run_sweep, summarize)


@pytest.fixture
def quick_config(tiny_config):
    return tiny_config.with_overrides(timesteps=3, epochs=1)


def test_actions_sweep_gives_one_sorted_row_per_value(quick_config,
                                                      tiny_dataset):
    spec = SweepSpec(param="b_actions", values=(3, 1, 5, 2, 4), repetitions=1)
    rows = run_sweep(spec, quick_config, tiny_dataset.graphs)
    assert [row.value for row in rows] == [1, 2, 3, 4, 5]
    assert all(len(row.accuracies) == 1 for row in rows)
    assert all(row.accuracy[1] == 0.0 for row in rows)


def test_row_record_formats_mean_and_std():
    row = SweepRow("k_neighbors", 5, (0.5, 0.7), (None, 0.8))
    record = row.to_record()
    assert record["accuracy"] == "0.600±0.100"
    assert record["auc_mean"] == 0.8 and record["auc_std"] == 0.0
    assert SweepRow("k_neighbors", 5, (0.5,), (None,)).auc is None


@pytest.mark.parametrize("kwargs", [
    {"param": "depth", "values": (1,)},
    {"param": "dimension", "values": ()},
    {"param": "dimension", "values": (0,)},
    {"param": "dimension", "values": (8,), "repetitions": 0},
])
def test_invalid_sweeps(kwargs):
    with pytest.raises(ValueError):
        SweepSpec(**kwargs)


def test_repetitions_reseed_each_run(quick_config, tiny_dataset):
    records = run_repetitions(quick_config.with_overrides(reps=2),
                              tiny_dataset.graphs)
    assert [r["seed"] for r in records] == [0, 1]
    summary = summarize(records)
    assert summary["runs"] == 2


def test_workers_do_not_change_results(quick_config, tiny_dataset):
    config = quick_config.with_overrides(reps=2)
    serial = run_repetitions(config, tiny_dataset.graphs, kind="gcn-fixed",
                             depth=2)
    parallel = run_repetitions(config.with_overrides(workers=2),
                               tiny_dataset.graphs, kind="gcn-fixed", depth=2)
    for record in serial + parallel:
        record["config"].pop("workers")
    assert serial == parallel


def test_mode_ablation_covers_every_loss_and_per_mode(quick_config,
                                                      tiny_dataset):
    rows = run_mode_ablation(quick_config, tiny_dataset.graphs,
                             truth=tiny_dataset.depths)
    assert [(r["q_loss_mode"], r["per_mode"]) for r in rows] == [
        ("max", "greedy"), ("max", "action"),
        ("gather", "greedy"), ("gather", "action")]
    assert all(r["runs"] == 1 for r in rows)
    assert all(r["depth_agreement"] is not None for r in rows)
