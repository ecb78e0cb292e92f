import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from numerics.autodiff import NonFiniteError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    # Bias correction counts the updates each parameter actually received
    updates: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(
                f"Adam learning rate must be positive, got {self.learning_rate}")


def adam_step(params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray],
              state: AdamState) -> Dict[str, np.ndarray]:
    """
    Apply one Adam update and return the new parameter set.

    Only parameters present in `grads` move; the others (and their moment
    accumulators) are left untouched.

    :param params: Parameter matrices keyed by name.
    :param grads: Gradients for a subset of `params`, same shapes.
    :param state: Optimizer state, updated in place.
    :return: A new dict with the updated parameters.
    """
    for name, grad in grads.items():
        if name not in params:
            raise ValueError(f"Gradient for unknown parameter '{name}'")
        if grad.shape != params[name].shape:
            raise ValueError(
                f"Gradient shape {grad.shape} does not match parameter "
                f"'{name}' shape {params[name].shape}")
        if not np.isfinite(grad).all():
            raise NonFiniteError(
                f"Non-finite gradient for parameter '{name}' at Adam step "
                f"{state.step + 1}; aborting")

    state.step += 1
    updated = dict(params)
    for name, grad in grads.items():
        first = state.first_moment.get(name)
        second = state.second_moment.get(name)
        if first is None:
            first = np.zeros_like(grad)
            second = np.zeros_like(grad)
        first = state.beta1 * first + (1.0 - state.beta1) * grad
        second = state.beta2 * second + (1.0 - state.beta2) * grad * grad
        count = state.updates.get(name, 0) + 1

        first_hat = first / (1.0 - state.beta1 ** count)
        second_hat = second / (1.0 - state.beta2 ** count)
        value = params[name] - state.learning_rate * first_hat / (
            np.sqrt(second_hat) + state.epsilon)
        value.setflags(write=False)

        updated[name] = value
        state.first_moment[name] = first
        state.second_moment[name] = second
        state.updates[name] = count
    return updated
