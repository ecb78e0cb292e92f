import numpy as np


def glorot_uniform(rng: np.random.Generator, fan_in: int,
                   fan_out: int) -> np.ndarray:
    """Uniform in +-sqrt(6 / (fan_in + fan_out))."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    weights = rng.uniform(-limit, limit, size=(fan_in, fan_out))
    weights.setflags(write=False)
    return weights


def parameter_rng(seed: int, slot: int) -> np.random.Generator:
    """Independent stream per (seed, parameter slot)."""
    return np.random.default_rng([seed, slot])


def seed_streams(seed: int, names) -> dict:
    """
    Split one run seed into named integer seeds.

    Streams are assigned by position in `names`, so a caller must always
    pass the same ordered list.
    """
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {
        name: int(child.generate_state(1)[0])
        for name, child in zip(names, children)
    }
