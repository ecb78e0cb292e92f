import json
import logging
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimestepRecord:
    timestep: int
    state_id: str
    action: int
    epsilon: float
    per: float
    reward: float
    policy_loss: float
    gnn_loss: float
    next_state_id: str
    val_depths: List[int]


@dataclass(frozen=True)
class EpochRecord:
    phase: str
    epoch: int
    train_loss: float
    val_accuracy: float


class RunLog:
    """
    Structured record of one run, written as JSON lines.

    Field order and float formatting are fixed, so equal runs give
    byte-identical files.
    """

    def __init__(self, path: Optional[str] = None) -> None:
        self._path = path
        self._timesteps: List[TimestepRecord] = []
        self._epochs: List[EpochRecord] = []
        self._final: Dict[str, Any] = {}

    @property
    def timesteps(self) -> List[TimestepRecord]:
        return list(self._timesteps)

    @property
    def epochs(self) -> List[EpochRecord]:
        return list(self._epochs)

    @property
    def final(self) -> Dict[str, Any]:
        return dict(self._final)

    def add_timestep(self, record: TimestepRecord) -> None:
        self._timesteps.append(record)

    def add_epoch(self, record: EpochRecord) -> None:
        self._epochs.append(record)

    def set_final(self, **metrics) -> None:
        self._final.update(metrics)

    def lines(self) -> List[str]:
        lines = [
            json.dumps({"record": "timestep", **asdict(r)}, sort_keys=True)
            for r in self._timesteps
        ]
        lines += [
            json.dumps({"record": "epoch", **asdict(r)}, sort_keys=True)
            for r in self._epochs
        ]
        if self._final:
            lines.append(
                json.dumps({"record": "final", **self._final}, sort_keys=True))
        return lines

    def flush(self) -> None:
        """Write every record to the log path (no-op without a path)."""
        if not self._path:
            return
        directory = os.path.dirname(os.path.abspath(self._path))
        os.makedirs(directory, exist_ok=True)
        with open(self._path, "w") as file:
            for line in self.lines():
                file.write(line + "\n")
        logger.info(
            f"Run log flushed to {self._path} ({len(self._timesteps)} "
            f"timesteps, {len(self._epochs)} epochs)")
