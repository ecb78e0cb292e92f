import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from experiments.metrics import accuracy, auc
from gnn.layers import instance_loss, predict
from gnn.model import GnnModel, GnnModelProps
from mdp.run_config import MdpConfig
from mdp.runlog import EpochRecord, RunLog
from netbuild.graphs import BuiltGraph, Splits
from policy.qnetwork import PolicyNets, encode_state, greedy_action

logger = logging.getLogger(__name__)

# (graph, epoch, rng) -> depth; epoch 0 is used for evaluation
DepthPolicy = Callable[[BuiltGraph, int, np.random.Generator], int]


@dataclass(frozen=True)
class InstancePrediction:
    graph_id: str
    label: int
    predicted: int
    positive_probability: float
    depth: int


@dataclass
class EvaluationResult:
    accuracy: float
    auc: Optional[float]
    predictions: List[InstancePrediction]
    depth_histogram: Dict[int, int] = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "auc": self.auc,
            "depth_histogram": {
                str(d): c for d, c in sorted(self.depth_histogram.items())},
        }


@dataclass
class TrainResult:
    model: GnnModel
    best_epoch: int
    validation_curve: List[float]
    validation: EvaluationResult
    test: EvaluationResult


def evaluate(model: GnnModel, graphs: Sequence[BuiltGraph],
             depths: Sequence[int], skip: bool = False) -> EvaluationResult:
    """
    Accuracy, AUC and per-instance predictions at the given depths.

    AUC is reported as None when the split holds a single class.
    """
    if not graphs:
        raise ValueError("Cannot evaluate an empty split")
    if len(depths) != len(graphs):
        raise ValueError(
            f"Got {len(depths)} depths for {len(graphs)} graphs")

    predictions = []
    for graph, depth in zip(graphs, depths):
        prediction = predict(model, graph, depth, skip=skip)
        predictions.append(InstancePrediction(
            graph_id=graph.graph_id,
            label=graph.label,
            predicted=prediction.label,
            positive_probability=float(prediction.probabilities[-1]),
            depth=int(depth),
        ))

    labels = [p.label for p in predictions]
    score = None
    if model.props.num_classes == 2 and len(set(labels)) == 2:
        score = auc([p.positive_probability for p in predictions], labels)
    else:
        logger.warning(
            f"AUC skipped: split of {len(labels)} graphs has classes "
            f"{sorted(set(labels))}")
    return EvaluationResult(
        accuracy=accuracy([p.predicted for p in predictions], labels),
        auc=score,
        predictions=predictions,
        depth_histogram=dict(Counter(int(d) for d in depths)),
    )


def fixed_depth(depth: int) -> DepthPolicy:
    def policy(graph, epoch, rng):
        return depth
    return policy


def greedy_depths(nets: PolicyNets, encoding: str) -> DepthPolicy:
    """Frozen meta-policy: the greedy action on each graph's state."""
    cache: Dict[str, int] = {}

    def policy(graph, epoch, rng):
        if graph.graph_id not in cache:
            state = encode_state(graph, encoding)
            cache[graph.graph_id] = greedy_action(nets.q_values(state)[0])
        return cache[graph.graph_id]
    return policy


def random_depths(max_depth: int, per_instance: bool = False) -> DepthPolicy:
    """Uniform depth per call, or drawn once per graph with `per_instance`."""
    cache: Dict[str, int] = {}

    def policy(graph, epoch, rng):
        if per_instance and graph.graph_id in cache:
            return cache[graph.graph_id]
        depth = int(rng.integers(1, max_depth + 1))
        cache[graph.graph_id] = depth
        return depth
    return policy


def select_best_epoch(curve: Sequence[float]) -> int:
    """1-based index of the first epoch with the highest validation value."""
    if not curve:
        return 0
    return int(np.argmax(curve)) + 1


def build_model(config: MdpConfig, num_features: int, max_depth: int,
                seed: int, kind: Optional[str] = None) -> GnnModel:
    model = GnnModel(props=GnnModelProps(
        kind=kind or config.gnn,
        num_features=num_features,
        max_depth=max_depth,
        dimension=config.dimension,
        num_classes=config.num_classes,
        dropout=config.dropout,
        slope=config.slope,
        seed=seed,
    ))
    model.set_optimizer(config.gnn_lr)
    return model


def train_step(model: GnnModel, graph: BuiltGraph, depth: int,
               rng: np.random.Generator, skip: bool = False) -> float:
    """One Adam step on a single instance; returns the loss."""
    binding = model.bind()
    loss = instance_loss(model, graph, depth, training=True, rng=rng,
                         binding=binding, skip=skip)
    loss.backward()
    model.apply_gradients(binding)
    return loss.item()


def train_with_depths(config: MdpConfig, splits: Splits,
                      depth_policy: DepthPolicy, max_depth: int,
                      model_seed: int, train_seed: int, depth_seed: int,
                      phase: str = "gnn2", kind: Optional[str] = None,
                      skip: bool = False,
                      run_log: Optional[RunLog] = None) -> TrainResult:
    """
    Train a fresh model for `config.epochs` epochs over the training split,
    each instance at the depth `depth_policy` assigns, and keep the
    parameters of the best validation epoch.
    """
    model = build_model(config, splits.train[0].num_nodes, max_depth,
                        model_seed, kind)
    train_rng = np.random.default_rng(train_seed)
    depth_rng = np.random.default_rng(depth_seed)

    def depths_for(graphs, epoch):
        return [depth_policy(g, epoch, depth_rng) for g in graphs]

    best_params = model.parameters
    best_accuracy = -1.0
    curve = []
    for epoch in range(1, config.epochs + 1):
        order = train_rng.permutation(len(splits.train))
        losses = []
        for index in order:
            graph = splits.train[index]
            depth = depth_policy(graph, epoch, depth_rng)
            losses.append(train_step(model, graph, depth, train_rng, skip))

        val_accuracy = evaluate(
            model, splits.val, depths_for(splits.val, epoch), skip).accuracy
        curve.append(val_accuracy)
        if run_log is not None:
            run_log.add_epoch(EpochRecord(
                phase=phase, epoch=epoch,
                train_loss=float(np.mean(losses)),
                val_accuracy=val_accuracy))
        logger.debug(
            f"[{phase}] epoch {epoch}: loss {np.mean(losses):.4f}, "
            f"val accuracy {val_accuracy:.3f}")
        if val_accuracy > best_accuracy:
            best_accuracy = val_accuracy
            best_params = model.parameters

    model.load_parameters(best_params)
    best_epoch = select_best_epoch(curve)
    validation = evaluate(model, splits.val, depths_for(splits.val, 0), skip)
    test = evaluate(model, splits.test, depths_for(splits.test, 0), skip)
    logger.info(
        f"[{phase}] best epoch {best_epoch}: val accuracy "
        f"{validation.accuracy:.3f}, test accuracy {test.accuracy:.3f}")
    return TrainResult(model=model, best_epoch=best_epoch,
                       validation_curve=curve, validation=validation,
                       test=test)


def train_gnn2(nets: PolicyNets, config: MdpConfig, splits: Splits,
               seeds: Dict[str, int],
               run_log: Optional[RunLog] = None) -> TrainResult:
    """Train and test a fresh GNN whose depths come from the frozen policy."""
    return train_with_depths(
        config, splits,
        depth_policy=greedy_depths(nets, config.state_encoding),
        max_depth=config.actions,
        model_seed=seeds["gnn2_init"],
        train_seed=seeds["train"],
        depth_seed=seeds["depth"],
        phase="gnn2",
        run_log=run_log,
    )
