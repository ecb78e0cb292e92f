import numpy as np
import pytest

from numerics.autodiff import NonFiniteError
from numerics.initializers import glorot_uniform, parameter_rng, seed_streams
from numerics.optim import AdamState, adam_step


def test_first_adam_step_moves_by_learning_rate():
    params = {"w": np.array([[3.0]])}
    state = AdamState(learning_rate=0.1)
    updated = adam_step(params, {"w": np.array([[6.0]])}, state)
    assert updated["w"][0, 0] == pytest.approx(2.9, abs=1e-8)
    assert state.step == 1


def test_adam_minimizes_a_parabola():
    params = {"x": np.array([[3.0]])}
    state = AdamState(learning_rate=0.1)
    for _ in range(100):
        params = adam_step(params, {"x": 2.0 * params["x"]}, state)
    assert abs(params["x"][0, 0]) < 0.5


def test_zero_gradient_leaves_parameters_unchanged():
    params = {"w": np.array([[1.5, -2.0]])}
    updated = adam_step(params, {"w": np.zeros((1, 2))},
                        AdamState(learning_rate=0.1))
    assert np.array_equal(updated["w"], params["w"])


def test_parameters_without_gradients_are_untouched():
    params = {"a": np.ones((2, 2)), "b": np.zeros((1, 3))}
    state = AdamState(learning_rate=0.01)
    updated = adam_step(params, {"a": np.ones((2, 2))}, state)
    assert updated["b"] is params["b"]
    assert "b" not in state.first_moment
    assert state.updates == {"a": 1}


def test_bias_correction_counts_per_parameter():
    params = {"a": np.array([[1.0]]), "b": np.array([[1.0]])}
    state = AdamState(learning_rate=0.1)
    params = adam_step(params, {"a": np.array([[1.0]])}, state)
    params = adam_step(params, {"b": np.array([[1.0]])}, state)
    # b's first update is a full-size step even at global step 2
    assert params["b"][0, 0] == pytest.approx(0.9, abs=1e-8)
    assert state.updates == {"a": 1, "b": 1}


def test_nan_gradient_aborts():
    with pytest.raises(NonFiniteError):
        adam_step({"w": np.ones((1, 1))}, {"w": np.array([[np.nan]])},
                  AdamState(learning_rate=0.1))


@pytest.mark.parametrize("grads", [
    {"missing": np.ones((1, 1))},
    {"w": np.ones((2, 1))},
])
def test_gradient_names_and_shapes_are_checked(grads):
    with pytest.raises(ValueError):
        adam_step({"w": np.ones((1, 1))}, grads, AdamState(learning_rate=0.1))


def test_glorot_bounds_and_reproducibility():
    weights = glorot_uniform(parameter_rng(3, 1), 10, 6)
    limit = np.sqrt(6.0 / 16)
    assert weights.shape == (10, 6)
    assert np.abs(weights).max() <= limit
    assert np.array_equal(weights, glorot_uniform(parameter_rng(3, 1), 10, 6))
    assert not np.array_equal(weights,
                              glorot_uniform(parameter_rng(3, 2), 10, 6))


def test_seed_streams_are_stable_and_distinct():
    first = seed_streams(5, ["a", "b", "c"])
    assert first == seed_streams(5, ["a", "b", "c"])
    assert len(set(first.values())) == 3
