import pytest
from hypothesis import given
from hypothesis import strategies as st

from policy.schedule import EpsilonSchedule, RewardWindow, epsilon_at, reward


@pytest.mark.parametrize("timestep, expected", [
    (1, 1.0),
    (10, 0.55),
    (20, 0.05),
    (21, 0.05),
    (1000, 0.05),
])
def test_default_epsilon_schedule(timestep, expected):
    assert epsilon_at(EpsilonSchedule(), timestep) == expected


@given(st.integers(min_value=1, max_value=100))
def test_epsilon_is_monotone_and_bounded(timestep):
    schedule = EpsilonSchedule()
    current = epsilon_at(schedule, timestep)
    assert schedule.end <= current <= schedule.start
    assert epsilon_at(schedule, timestep + 1) <= current


def test_epsilon_schedule_validation():
    with pytest.raises(ValueError):
        EpsilonSchedule(start=0.1, end=0.5)
    with pytest.raises(ValueError):
        epsilon_at(EpsilonSchedule(), 0)


def test_windowed_reward_fixture():
    window = RewardWindow(20)
    window.append(0.60)
    window.append(0.70)
    # 0.6, 0.7 and 0.8 are not exact binary fractions
    assert reward(window, 0.80) == pytest.approx(0.15, abs=1e-15)
    assert window.history == [0.60, 0.70, 0.80]


def test_first_reward_is_zero():
    window = RewardWindow(3)
    assert reward(window, 0.9) == 0.0
    assert window.history == [0.9]


def test_window_keeps_only_the_latest_values():
    window = RewardWindow(2)
    for per in (0.1, 0.2, 0.3):
        reward(window, per)
    assert window.history == [0.2, 0.3]
    assert reward(window, 0.25) == pytest.approx(0.0, abs=1e-15)


def test_single_step_window_rewards_telescope():
    window = RewardWindow(1)
    pers = [0.5, 0.6, 0.55, 0.7, 0.6]
    total = sum(reward(window, per) for per in pers)
    assert total == pytest.approx(pers[-1] - pers[0], abs=1e-12)
