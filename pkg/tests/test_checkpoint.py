import numpy as np
import pytest

from gnn.checkpoint import (load_model, read_checkpoint, save_model,
                            write_checkpoint)
from gnn.model import GnnModel, GnnModelProps
from policy.checkpoint import load_policy, save_policy
from policy.qnetwork import PolicyNets, PolicyNetsProps, sync_target
from policy.schedule import EpsilonSchedule


def test_model_round_trip_is_exact(tmp_path):
    model = GnnModel(props=GnnModelProps(
        kind="gat", num_features=5, max_depth=2, dimension=3, seed=4))
    path = str(tmp_path / "model.ckpt")
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.config() == model.config()
    for name, value in model.parameters.items():
        assert np.array_equal(loaded.parameters[name], value)


def test_checkpoint_text_is_stable(tmp_path):
    params = {"b": np.array([[0.1, 1 / 3]]), "a": np.eye(2)}
    first, second = tmp_path / "1.ckpt", tmp_path / "2.ckpt"
    write_checkpoint(str(first), "gnn", {"x": 1}, params)
    write_checkpoint(str(second), "gnn", {"x": 1}, dict(reversed(
        list(params.items()))))
    assert first.read_bytes() == second.read_bytes()
    header, loaded = read_checkpoint(str(first))
    assert header == {"kind": "gnn", "x": 1}
    assert loaded["b"][0, 1] == 1 / 3


def test_unknown_header_is_rejected(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_text("something else\n{}\n")
    with pytest.raises(ValueError, match="unsupported checkpoint header"):
        read_checkpoint(str(path))


def test_policy_round_trip(tmp_path):
    nets = PolicyNets(props=PolicyNetsProps(
        input_size=4, num_actions=3, hidden=5, seed=1))
    sync_target(nets)
    schedule = EpsilonSchedule(start=0.9, end=0.1, horizon=7)
    path = str(tmp_path / "policy.ckpt")
    save_policy(nets, schedule, path)
    loaded, loaded_schedule = load_policy(path)
    assert loaded_schedule == schedule
    assert loaded.steps == nets.steps
    states = np.ones((2, 4))
    assert np.array_equal(loaded.q_values(states), nets.q_values(states))
    assert np.array_equal(loaded.q_values(states, target=True),
                          nets.q_values(states, target=True))


def test_policy_loader_rejects_model_checkpoints(tmp_path):
    model = GnnModel(props=GnnModelProps(
        kind="gcn", num_features=3, max_depth=1, dimension=2))
    path = str(tmp_path / "model.ckpt")
    save_model(model, path)
    with pytest.raises(ValueError, match="not a policy"):
        load_policy(path)
