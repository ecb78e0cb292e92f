import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from config.path_builder import PathBuilder
from experiments.splits import split
from gnn.checkpoint import load_model, save_model
from mdp.run_config import MdpConfig, run_seeds
from mdp.runlog import RunLog
from mdp.runner import run_mdp
from mdp.trainer import (EvaluationResult, InstancePrediction, TrainResult,
                         evaluate, greedy_depths, train_gnn2)
from netbuild.graphs import Splits, WeightedGraph, build_splits
from netbuild.subject_graph import SubjectGraph, build_subject_graph
from policy.checkpoint import load_policy, save_policy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedData:
    raw: Splits
    built: Splits
    subject_graph: Optional[SubjectGraph]


@dataclass
class RunResult:
    """Metrics of one seeded run, as written to the results file."""
    kind: str
    seed: int
    config: dict
    best_epoch: int
    validation: EvaluationResult
    test: EvaluationResult
    depth: Optional[int] = None
    agreement: Optional[float] = None
    extra: Dict[str, object] = field(default_factory=dict)

    def to_record(self) -> dict:
        record = {
            "kind": self.kind,
            "seed": self.seed,
            "depth": self.depth,
            "config": self.config,
            "best_epoch": self.best_epoch,
            "val_accuracy": self.validation.accuracy,
            "val_auc": self.validation.auc,
            "test_accuracy": self.test.accuracy,
            "test_auc": self.test.auc,
            "depth_histogram": self.test.to_record()["depth_histogram"],
            "depth_agreement": self.agreement,
        }
        record.update(self.extra)
        return record


def prepare_splits(config: MdpConfig, graphs: Sequence[WeightedGraph],
                   seeds: Dict[str, int],
                   with_subject_graph: bool = True) -> PreparedData:
    """
    Split, run network building, and build the subject graph on the
    training and validation subjects.
    """
    raw = split(graphs, seeds["split"])
    built = build_splits(raw, config.k, config.input_mode, config.binary_edges)
    subject_graph = None
    if with_subject_graph:
        subject_graph = build_subject_graph(
            raw.train + raw.val, config.subject_k)
    return PreparedData(raw=raw, built=built, subject_graph=subject_graph)


def depth_agreement(predictions: Sequence[InstancePrediction],
                    truth: Dict[str, int]) -> float:
    """Fraction of instances run at their known best depth."""
    if not predictions:
        raise ValueError("depth_agreement needs at least one prediction")
    matches = sum(int(p.depth == truth[p.graph_id]) for p in predictions)
    return matches / len(predictions)


def result_from_training(kind: str, config: MdpConfig, trained: TrainResult,
                         truth: Optional[Dict[str, int]] = None,
                         depth: Optional[int] = None) -> RunResult:
    agreement = None
    if truth is not None:
        agreement = depth_agreement(trained.test.predictions, truth)
    return RunResult(
        kind=kind,
        seed=config.seed,
        config=config.to_dict(),
        best_epoch=trained.best_epoch,
        validation=trained.validation,
        test=trained.test,
        depth=depth,
        agreement=agreement,
    )


def run_pipeline(config: MdpConfig, graphs: Sequence[WeightedGraph],
                 truth: Optional[Dict[str, int]] = None,
                 paths: Optional[PathBuilder] = None) -> RunResult:
    """
    Full adaptive-depth run: MDP co-training of GNN1 and the meta-policy,
    then a fresh GNN2 trained and tested at the policy's depths.
    """
    seeds = run_seeds(config.seed)
    data = prepare_splits(config, graphs, seeds)
    run_log = RunLog(
        paths.get_output_path("logs", "run_log") if paths else None)

    mdp = run_mdp(config, data.built, data.subject_graph, run_log, seeds)
    gnn2 = train_gnn2(mdp.policy, config, data.built, seeds, run_log)
    result = result_from_training(f"bn-{config.gnn}", config, gnn2, truth)
    result.extra["val_depth_histogram"] = (
        gnn2.validation.to_record()["depth_histogram"])

    run_log.set_final(**{
        k: v for k, v in result.to_record().items() if k != "config"})
    run_log.flush()
    if paths:
        save_policy(mdp.policy, mdp.schedule,
                    paths.get_output_path("checkpoints", "policy"))
        save_model(mdp.gnn1, paths.get_output_path("checkpoints", "gnn1"))
        save_model(gnn2.model, paths.get_output_path("checkpoints", "gnn2"))
    logger.info(
        f"Seed {config.seed}: test accuracy {result.test.accuracy:.3f}, "
        f"test AUC {result.test.auc}")
    return result


def evaluate_checkpoints(config: MdpConfig, graphs: Sequence[WeightedGraph],
                         policy_path: str, model_path: str) -> EvaluationResult:
    """Re-score saved policy and GNN2 checkpoints on the test split."""
    nets, _ = load_policy(policy_path)
    model = load_model(model_path)
    data = prepare_splits(config, graphs, run_seeds(config.seed),
                          with_subject_graph=False)
    depth_of = greedy_depths(nets, config.state_encoding)
    test = list(data.built.test)
    return evaluate(model, test, [depth_of(g, 0, None) for g in test])


def write_results(path: str, records: List[dict]) -> None:
    """One JSON record per line with sorted keys."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as file:
        for record in records:
            file.write(json.dumps(record, sort_keys=True) + "\n")
    logger.info(f"Wrote {len(records)} result records to {path}")
