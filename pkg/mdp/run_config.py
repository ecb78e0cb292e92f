from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict

from gnn.model import GNN_KINDS
from netbuild.graphs import INPUT_MODES
from numerics.initializers import seed_streams
from policy.qnetwork import LOSS_MODES, STATE_ENCODINGS

PER_MODES = ("greedy", "action")
GNN1_MODES = ("step", "full_pass")
RANDOM_POLICY_MODES = ("per_epoch", "per_instance")

_CHOICES = {
    "gnn": GNN_KINDS,
    "q_loss_mode": LOSS_MODES,
    "per_mode": PER_MODES,
    "gnn1_mode": GNN1_MODES,
    "state_encoding": STATE_ENCODINGS,
    "input_mode": INPUT_MODES,
    "random_policy_mode": RANDOM_POLICY_MODES,
}


@dataclass(frozen=True)
class MdpConfig:
    """Every knob of a run. Defaults follow the published settings."""
    timesteps: int = 1000
    actions: int = 3
    window: int = 20
    gamma: float = 0.95
    gnn: str = "gcn"
    dimension: int = 128
    k: int = 10
    subject_k: int = 10
    seed: int = 0
    gnn_lr: float = 0.005
    policy_lr: float = 0.0005
    dropout: float = 0.3
    slope: float = 0.2
    epochs: int = 100
    replay_capacity: int = 500
    batch_size: int = 32
    sync_period: int = 50
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_horizon: int = 20
    hidden: int = 256
    num_classes: int = 2
    q_loss_mode: str = "max"
    per_mode: str = "greedy"
    gnn1_mode: str = "step"
    state_encoding: str = "flattened"
    input_mode: str = "normalized"
    binary_edges: bool = False
    random_policy_mode: str = "per_epoch"
    reps: int = 10
    workers: int = 1
    log_every: int = 100

    def __post_init__(self) -> None:
        for name, choices in _CHOICES.items():
            value = getattr(self, name)
            if value not in choices:
                raise ValueError(
                    f"Invalid {name}: {value}. "
                    f"Valid values are: {', '.join(choices)}")
        for name in ("timesteps", "actions", "window", "dimension", "k",
                     "subject_k", "replay_capacity", "batch_size",
                     "sync_period", "epsilon_horizon", "hidden", "reps",
                     "workers", "log_every"):
            if getattr(self, name) < 1:
                raise ValueError(
                    f"{name} must be positive, got {getattr(self, name)}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.gnn_lr <= 0 or self.policy_lr <= 0:
            raise ValueError("Learning rates must be positive")

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "MdpConfig":
        """Build a config from loosely typed values (YAML, CLI strings)."""
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ValueError(
                f"Unknown configuration keys: {', '.join(unknown)}. "
                f"Valid keys are: {', '.join(sorted(known))}")
        return cls(**{
            name: _coerce(name, value, type(known[name].default))
            for name, value in values.items()
        })

    def with_overrides(self, **overrides) -> "MdpConfig":
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(name: str, value: Any, kind: type) -> Any:
    try:
        if kind is bool and isinstance(value, str):
            lowered = value.strip().lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return lowered in ("true", "1", "yes")
        if kind is int and isinstance(value, float) and not value.is_integer():
            raise ValueError(value)
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ValueError(
            f"Configuration key '{name}' expects {kind.__name__}, "
            f"got {value!r}") from e


# Order is part of the seeding contract; append new streams at the end
SEED_STREAMS = ("split", "mdp", "gnn1_init", "gnn2_init", "train", "depth",
                "synthetic")


def run_seeds(seed: int) -> Dict[str, int]:
    """Named seeds for the independent random streams of one run."""
    return seed_streams(seed, SEED_STREAMS)
