import dataclasses

import numpy as np
import pytest

from experiments.synthetic import SyntheticSpec, generate_synthetic
from mdp.run_config import MdpConfig
from netbuild.graphs import BuiltGraph, WeightedGraph


def random_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    weights = rng.random((n, n))
    return (weights + weights.T) / 2.0


def random_graph(rng: np.random.Generator, n: int, graph_id: str = "g",
                 label: int = 0) -> WeightedGraph:
    return WeightedGraph(graph_id, random_weights(rng, n), label)


class ConstantPolicy:
    """Stands in for PolicyNets: the same Q-values for every state."""

    def __init__(self, q_row):
        self.q_row = np.array([q_row], dtype=float)

    def q_values(self, states, target=False):
        return self.q_row


def permute_graph(graph: BuiltGraph, order: np.ndarray) -> BuiltGraph:
    """Relabel the nodes of a built graph; feature columns stay put."""
    def both(matrix):
        permuted = np.array(matrix[np.ix_(order, order)])
        permuted.setflags(write=False)
        return permuted

    features = np.array(graph.features[order])
    features.setflags(write=False)
    return dataclasses.replace(
        graph,
        adjacency=both(graph.adjacency),
        normalized=both(graph.normalized),
        aggregation=both(graph.aggregation),
        attention_mask=both(graph.attention_mask),
        features=features,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def tiny_config():
    return MdpConfig(
        timesteps=6, actions=3, dimension=8, k=3, subject_k=3, epochs=2,
        hidden=16, batch_size=4, replay_capacity=10, sync_period=3, reps=1,
        log_every=2, epsilon_horizon=5)


@pytest.fixture(scope="session")
def tiny_dataset():
    return generate_synthetic(SyntheticSpec(m=20, n=10, k=3, seed=1))
