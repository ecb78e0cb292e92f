import math
from collections import deque
from dataclasses import dataclass
from typing import List

import numpy as np


@dataclass(frozen=True)
class Experience:
    """One <s, a, r, s'> record; states carry the subject id and vector."""
    state_id: str
    state: np.ndarray
    action: int
    reward: float
    next_state_id: str
    next_state: np.ndarray

    def __post_init__(self) -> None:
        if self.action < 1:
            raise ValueError(f"Actions start at 1, got {self.action}")
        if not math.isfinite(self.reward):
            raise ValueError(f"Reward must be finite, got {self.reward}")


class ReplayMemory:
    """Bounded FIFO of experiences with uniform sampling without replacement."""

    def __init__(self, capacity: int = 500, batch_size: int = 32) -> None:
        if capacity < 1 or batch_size < 1:
            raise ValueError(
                f"Replay capacity and batch size must be positive, "
                f"got {capacity} and {batch_size}")
        self._buffer = deque(maxlen=capacity)
        self._batch_size = batch_size

    @property
    def capacity(self) -> int:
        return self._buffer.maxlen

    @property
    def batch_size(self) -> int:
        return self._batch_size

    def __len__(self) -> int:
        return len(self._buffer)

    def __getitem__(self, index: int) -> Experience:
        return self._buffer[index]

    def store(self, experience: Experience) -> None:
        # deque(maxlen) drops the oldest entry when full
        self._buffer.append(experience)

    def sample_indices(self, rng: np.random.Generator) -> np.ndarray:
        size = min(self._batch_size, len(self._buffer))
        return rng.choice(len(self._buffer), size=size, replace=False)

    def sample(self, rng: np.random.Generator) -> List[Experience]:
        if not self._buffer:
            return []
        return [self._buffer[i] for i in self.sample_indices(rng)]


def store_and_sample(memory: ReplayMemory, experience: Experience,
                     rng: np.random.Generator) -> List[Experience]:
    memory.store(experience)
    return memory.sample(rng)
