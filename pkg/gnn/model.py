import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import numpy as np

from numerics.autodiff import Node, parameter
from numerics.initializers import glorot_uniform, parameter_rng
from numerics.optim import AdamState, adam_step

logger = logging.getLogger(__name__)

GNN_KINDS = ("gcn", "gat")

CLASSIFIER = "classifier.transform"


def transform_name(layer: int) -> str:
    return f"layer{layer}.transform"


def attention_name(layer: int) -> str:
    return f"layer{layer}.attention"


@dataclass
class GnnModelProps:
    kind: str
    num_features: int
    max_depth: int
    dimension: int = 128
    num_classes: int = 2
    dropout: float = 0.3
    slope: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in GNN_KINDS:
            raise ValueError(
                f"Invalid GNN kind: {self.kind}. "
                f"Valid kinds are: {', '.join(GNN_KINDS)}")
        for name in ("num_features", "max_depth", "dimension"):
            if getattr(self, name) < 1:
                raise ValueError(
                    f"{name} must be positive, got {getattr(self, name)}")
        if self.num_classes < 2:
            raise ValueError(
                f"num_classes must be at least 2, got {self.num_classes}")


class ParameterBinding:
    """
    Graph leaves for one forward/backward pass.

    Leaves are created on first use, so after `backward()` only the
    parameters that took part in the pass report a gradient.
    """

    def __init__(self, values: Dict[str, np.ndarray]) -> None:
        self._values = values
        self._leaves: Dict[str, Node] = {}

    def __getitem__(self, name: str) -> Node:
        if name not in self._leaves:
            self._leaves[name] = parameter(self._values[name], name)
        return self._leaves[name]

    def gradients(self) -> Dict[str, np.ndarray]:
        return {
            name: leaf.grad if leaf.grad is not None
            else np.zeros_like(leaf.value)
            for name, leaf in self._leaves.items()
        }


class GnnModel:
    """
    A b-layer GCN or single-head GAT whose first j layers serve any depth j.

    Layer 1 maps n input features to d, layers 2..b map d to d, and one
    shared classifier maps d to the class scores for every depth.
    """

    @property
    def props(self) -> GnnModelProps:
        return self._props

    @property
    def parameters(self) -> Dict[str, np.ndarray]:
        return dict(self._parameters)

    @property
    def optimizer(self) -> Optional[AdamState]:
        return self._optimizer

    def __init__(self, props: GnnModelProps) -> None:
        self._props = props
        self._parameters = self._initialize()
        self._optimizer: Optional[AdamState] = None

    def _initialize(self) -> Dict[str, np.ndarray]:
        props = self._props
        params = {}
        # Every matrix draws from its own stream so the first j layers are
        # the same whatever the model's max depth
        for layer in range(1, props.max_depth + 1):
            fan_in = props.num_features if layer == 1 else props.dimension
            params[transform_name(layer)] = glorot_uniform(
                parameter_rng(props.seed, layer), fan_in, props.dimension)
            if props.kind == "gat":
                params[attention_name(layer)] = glorot_uniform(
                    parameter_rng(props.seed, 1000 + layer),
                    2 * props.dimension, 1)
        params[CLASSIFIER] = glorot_uniform(
            parameter_rng(props.seed, 0), props.dimension, props.num_classes)
        return params

    def layer_parameter_names(self, layer: int) -> List[str]:
        names = [transform_name(layer)]
        if self._props.kind == "gat":
            names.append(attention_name(layer))
        return names

    def check_depth(self, depth: int) -> None:
        if not 1 <= depth <= self._props.max_depth:
            raise ValueError(
                f"Depth {depth} out of range; model supports 1.."
                f"{self._props.max_depth}")

    def bind(self) -> ParameterBinding:
        return ParameterBinding(self._parameters)

    def set_optimizer(self, learning_rate: float) -> None:
        self._optimizer = AdamState(learning_rate=learning_rate)

    def apply_gradients(self, binding: ParameterBinding) -> None:
        if self._optimizer is None:
            raise ValueError("Call set_optimizer() before training the model")
        self._parameters = adam_step(
            self._parameters, binding.gradients(), self._optimizer)

    def load_parameters(self, params: Dict[str, np.ndarray]) -> None:
        missing = set(self._parameters) ^ set(params)
        if missing:
            raise ValueError(
                f"Parameter names do not match the model: {sorted(missing)}")
        for name, value in params.items():
            if value.shape != self._parameters[name].shape:
                raise ValueError(
                    f"Parameter '{name}' has shape {value.shape}, "
                    f"expected {self._parameters[name].shape}")
        self._parameters = dict(params)

    def config(self) -> dict:
        return asdict(self._props)
