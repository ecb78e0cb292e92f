import logging
from dataclasses import asdict, dataclass
from typing import Dict, Sequence

import numpy as np

from gnn.model import ParameterBinding
from netbuild.graphs import BuiltGraph
from numerics.autodiff import (Node, add, constant, leaky_relu, matmul,
                               max_cols, mean_all, pick, square, sub)
from numerics.initializers import glorot_uniform, parameter_rng
from numerics.optim import AdamState, adam_step
from policy.memory import Experience

logger = logging.getLogger(__name__)

LOSS_MODES = ("max", "gather")
STATE_ENCODINGS = ("flattened", "row_sums")


def state_size(num_nodes: int, encoding: str) -> int:
    if encoding == "flattened":
        return num_nodes * num_nodes
    if encoding == "row_sums":
        return num_nodes
    raise ValueError(
        f"Invalid state encoding: {encoding}. "
        f"Valid encodings are: {', '.join(STATE_ENCODINGS)}")


def encode_state(graph: BuiltGraph, encoding: str = "flattened") -> np.ndarray:
    """The policy's view of a graph: its aggregation matrix."""
    if encoding == "row_sums":
        state = graph.aggregation.sum(axis=1)
    else:
        # Rejects unknown encodings
        state_size(graph.num_nodes, encoding)
        state = graph.aggregation.reshape(-1).copy()
    state.setflags(write=False)
    return state


@dataclass
class PolicyNetsProps:
    input_size: int
    num_actions: int
    hidden: int = 256
    slope: float = 0.2
    learning_rate: float = 0.0005
    sync_period: int = 50
    loss_mode: str = "max"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.loss_mode not in LOSS_MODES:
            raise ValueError(
                f"Invalid policy loss mode: {self.loss_mode}. "
                f"Valid modes are: {', '.join(LOSS_MODES)}")
        for name in ("input_size", "num_actions", "hidden", "sync_period"):
            if getattr(self, name) < 1:
                raise ValueError(
                    f"{name} must be positive, got {getattr(self, name)}")


class PolicyNets:
    """
    Evaluation and target Q-networks (input -> hidden -> b Q-values).

    Only q_eval is trained; q_target changes only through sync_target.
    """

    @property
    def props(self) -> PolicyNetsProps:
        return self._props

    @property
    def eval_parameters(self) -> Dict[str, np.ndarray]:
        return dict(self._eval)

    @property
    def target_parameters(self) -> Dict[str, np.ndarray]:
        return dict(self._target)

    @property
    def steps(self) -> int:
        """Gradient steps taken on q_eval."""
        return self._steps

    @property
    def optimizer(self) -> AdamState:
        return self._optimizer

    def __init__(self, props: PolicyNetsProps) -> None:
        self._props = props
        self._eval = self._initialize()
        self._target = dict(self._eval)
        self._optimizer = AdamState(learning_rate=props.learning_rate)
        self._steps = 0

    def _initialize(self) -> Dict[str, np.ndarray]:
        props = self._props
        zeros_hidden = np.zeros((1, props.hidden))
        zeros_output = np.zeros((1, props.num_actions))
        for bias in (zeros_hidden, zeros_output):
            bias.setflags(write=False)
        return {
            "hidden.weight": glorot_uniform(
                parameter_rng(props.seed, 1), props.input_size, props.hidden),
            "hidden.bias": zeros_hidden,
            "output.weight": glorot_uniform(
                parameter_rng(props.seed, 2), props.hidden,
                props.num_actions),
            "output.bias": zeros_output,
        }

    def _check_states(self, states: np.ndarray) -> np.ndarray:
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        if states.shape[1] != self._props.input_size:
            raise ValueError(
                f"State vectors have length {states.shape[1]}, policy "
                f"expects {self._props.input_size}")
        return states

    def forward(self, binding: ParameterBinding, states: np.ndarray) -> Node:
        states = constant(self._check_states(states))
        hidden = leaky_relu(
            add(matmul(states, binding["hidden.weight"]),
                binding["hidden.bias"]),
            self._props.slope)
        return add(matmul(hidden, binding["output.weight"]),
                   binding["output.bias"])

    def q_values(self, states: np.ndarray, target: bool = False) -> np.ndarray:
        """Q-values for a batch of states, one row per state."""
        params = self._target if target else self._eval
        return self.forward(ParameterBinding(params), states).value

    def bind(self) -> ParameterBinding:
        return ParameterBinding(self._eval)

    def apply_gradients(self, binding: ParameterBinding) -> None:
        self._eval = adam_step(self._eval, binding.gradients(), self._optimizer)
        self._steps += 1
        if self._steps % self._props.sync_period == 0:
            sync_target(self)

    def copy_target_from_eval(self) -> None:
        self._target = dict(self._eval)

    def load(self, eval_params: Dict[str, np.ndarray],
             target_params: Dict[str, np.ndarray], steps: int) -> None:
        for params in (eval_params, target_params):
            if set(params) != set(self._eval):
                raise ValueError(
                    f"Policy parameter names {sorted(params)} do not match "
                    f"{sorted(self._eval)}")
        self._eval = dict(eval_params)
        self._target = dict(target_params)
        self._steps = steps

    def config(self) -> dict:
        return asdict(self._props)


def greedy_action(q_row: np.ndarray) -> int:
    """1-based argmax; ties go to the lowest action."""
    return int(np.argmax(q_row)) + 1


def select_action(nets: PolicyNets, state: np.ndarray, epsilon: float,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy action in 1..b."""
    if rng.random() < epsilon:
        return int(rng.integers(1, nets.props.num_actions + 1))
    return greedy_action(nets.q_values(state)[0])


def policy_loss(nets: PolicyNets, batch: Sequence[Experience], gamma: float,
                binding: ParameterBinding) -> Node:
    """
    Mean squared TD error over a batch.

    The target r + gamma * max Q_target(s') is a constant. In "max" mode
    the prediction is max_a Q_eval(s, a); in "gather" mode it is
    Q_eval(s, a_taken).
    """
    if not batch:
        raise ValueError("Policy loss needs a non-empty batch")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"Discount must be in [0, 1), got {gamma}")
    for experience in batch:
        if experience.action > nets.props.num_actions:
            raise ValueError(
                f"Action {experience.action} exceeds the "
                f"{nets.props.num_actions} available actions")

    states = np.stack([e.state for e in batch])
    next_states = np.stack([e.next_state for e in batch])
    rewards = np.array([e.reward for e in batch])

    next_q = nets.q_values(next_states, target=True)
    targets = (rewards + gamma * next_q.max(axis=1)).reshape(-1, 1)

    q = nets.forward(binding, states)
    if nets.props.loss_mode == "max":
        predicted = max_cols(q)
    else:
        predicted = pick(q, [e.action - 1 for e in batch])
    return mean_all(square(sub(constant(targets), predicted)))


def train_policy(nets: PolicyNets, batch: Sequence[Experience],
                 gamma: float) -> float:
    """One gradient step on q_eval; returns the loss before the step."""
    binding = nets.bind()
    loss = policy_loss(nets, batch, gamma, binding)
    loss.backward()
    nets.apply_gradients(binding)
    return loss.item()


def sync_target(nets: PolicyNets) -> PolicyNets:
    """Copy q_eval's parameters into q_target."""
    nets.copy_target_from_eval()
    logger.debug(f"Synchronized target network at policy step {nets.steps}")
    return nets
