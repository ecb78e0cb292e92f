from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import List


@dataclass(frozen=True)
class EpsilonSchedule:
    start: float = 1.0
    end: float = 0.05
    horizon: int = 20

    def __post_init__(self) -> None:
        if not 0.0 <= self.end <= self.start <= 1.0:
            raise ValueError(
                f"Epsilon schedule needs 0 <= end <= start <= 1, "
                f"got start={self.start}, end={self.end}")
        if self.horizon < 1:
            raise ValueError(
                f"Epsilon horizon must be positive, got {self.horizon}")


def epsilon_at(schedule: EpsilonSchedule, timestep: int) -> float:
    """Linear decay from `start` at timestep 1 to `end` at `horizon`."""
    if timestep < 1:
        raise ValueError(f"Timesteps start at 1, got {timestep}")
    if timestep >= schedule.horizon:
        return schedule.end
    # Exact rational arithmetic, rounded once
    fraction = Fraction(timestep - 1, schedule.horizon - 1)
    start, end = Fraction(schedule.start), Fraction(schedule.end)
    return float(start - fraction * (start - end))


class RewardWindow:
    """The last `size` PER values, oldest first."""

    def __init__(self, size: int = 20) -> None:
        if size < 1:
            raise ValueError(f"Reward window size must be positive, got {size}")
        self._history = deque(maxlen=size)

    @property
    def size(self) -> int:
        return self._history.maxlen

    @property
    def history(self) -> List[float]:
        return list(self._history)

    def append(self, per: float) -> None:
        self._history.append(per)


def reward(window: RewardWindow, per_now: float) -> float:
    """
    PER now minus the mean PER over the window, then record PER now.

    The first reward (empty window) is 0.
    """
    history = window.history
    value = per_now - sum(history) / len(history) if history else 0.0
    window.append(per_now)
    return value
