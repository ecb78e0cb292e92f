import logging
from dataclasses import dataclass
from itertools import product
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

from config.path_builder import PathBuilder
from experiments.baselines import run_baseline
from experiments.metrics import format_mean_std, mean_std
from experiments.pipeline import run_pipeline
from mdp.run_config import PER_MODES, MdpConfig
from netbuild.graphs import WeightedGraph
from policy.qnetwork import LOSS_MODES

logger = logging.getLogger(__name__)

# Sweep parameter -> MdpConfig field
SWEEP_PARAMETERS = {
    "k_neighbors": "k",
    "b_actions": "actions",
    "dimension": "dimension",
}

ADAPTIVE = "bn-gnn"


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: Tuple[int, ...]
    repetitions: int = 10

    def __post_init__(self) -> None:
        if self.param not in SWEEP_PARAMETERS:
            raise ValueError(
                f"Invalid sweep parameter: {self.param}. "
                f"Valid parameters are: {', '.join(SWEEP_PARAMETERS)}")
        if not self.values:
            raise ValueError("A sweep needs at least one value")
        if any(v < 1 for v in self.values):
            raise ValueError(f"Sweep values must be positive, got {self.values}")
        if self.repetitions < 1:
            raise ValueError(
                f"Repetitions must be >= 1, got {self.repetitions}")


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: int
    accuracies: Tuple[float, ...]
    aucs: Tuple[Optional[float], ...]

    @property
    def accuracy(self) -> Tuple[float, float]:
        return mean_std(list(self.accuracies))

    @property
    def auc(self) -> Optional[Tuple[float, float]]:
        scored = [a for a in self.aucs if a is not None]
        return mean_std(scored) if scored else None

    def to_record(self) -> dict:
        accuracy_mean, accuracy_std = self.accuracy
        record = {
            "param": self.param,
            "value": self.value,
            "repetitions": len(self.accuracies),
            "accuracy_mean": accuracy_mean,
            "accuracy_std": accuracy_std,
            "accuracy": format_mean_std(list(self.accuracies)),
            "auc_mean": None,
            "auc_std": None,
        }
        if self.auc is not None:
            record["auc_mean"], record["auc_std"] = self.auc
        return record


def _run_task(task) -> dict:
    """One repetition; top level so it can cross a process boundary."""
    kind, depth, config, graphs, truth, out_dir, paths_file = task
    if kind == ADAPTIVE:
        paths = None
        if out_dir:
            paths = PathBuilder(out_dir, f"seed{config.seed}", paths_file)
        return run_pipeline(config, graphs, truth, paths).to_record()
    return run_baseline(kind, config, graphs, depth, truth).to_record()


def run_repetitions(config: MdpConfig, graphs: Sequence[WeightedGraph],
                    kind: str = ADAPTIVE, depth: Optional[int] = None,
                    truth: Optional[Dict[str, int]] = None,
                    out_dir: Optional[str] = None,
                    paths_file: Optional[str] = None) -> List[dict]:
    """
    `config.reps` runs reseeded as seed, seed+1, ...; records come back in
    seed order whatever the worker count.
    """
    tasks = [
        (kind, depth, config.with_overrides(seed=config.seed + rep),
         list(graphs), truth, out_dir, paths_file)
        for rep in range(config.reps)
    ]
    if config.workers > 1 and len(tasks) > 1:
        with Pool(min(config.workers, len(tasks))) as pool:
            records = pool.map(_run_task, tasks)
    else:
        records = [_run_task(task) for task in tasks]
    logger.info(f"Finished {len(records)} repetitions of '{kind}'")
    return records


def summarize(records: Sequence[dict]) -> dict:
    """mean±std of test accuracy and AUC over repetition records."""
    accuracies = [r["test_accuracy"] for r in records]
    aucs = [r["test_auc"] for r in records if r["test_auc"] is not None]
    return {
        "runs": len(records),
        "test_accuracy": format_mean_std(accuracies),
        "test_auc": format_mean_std(aucs) if aucs else None,
    }


def run_sweep(spec: SweepSpec, config: MdpConfig,
              graphs: Sequence[WeightedGraph]) -> List[SweepRow]:
    """Full pipeline per value and repetition; rows sorted by value."""
    field_name = SWEEP_PARAMETERS[spec.param]
    rows = []
    for value in sorted(set(spec.values)):
        swept = config.with_overrides(
            **{field_name: value, "reps": spec.repetitions})
        records = run_repetitions(swept, graphs)
        rows.append(SweepRow(
            param=spec.param,
            value=value,
            accuracies=tuple(r["test_accuracy"] for r in records),
            aucs=tuple(r["test_auc"] for r in records),
        ))
        logger.info(
            f"Sweep {spec.param}={value}: accuracy "
            f"{rows[-1].to_record()['accuracy']}")
    return rows


def run_mode_ablation(config: MdpConfig, graphs: Sequence[WeightedGraph],
                      truth: Optional[Dict[str, int]] = None) -> List[dict]:
    """
    Adaptive runs under every Q-loss form and PER mode.

    One row per (q_loss_mode, per_mode) pair, each summarizing
    `config.reps` seeds, so the variants can be read side by side.
    """
    rows = []
    for q_loss_mode, per_mode in product(LOSS_MODES, PER_MODES):
        records = run_repetitions(
            config.with_overrides(q_loss_mode=q_loss_mode, per_mode=per_mode),
            graphs, truth=truth)
        agreements = [r["depth_agreement"] for r in records
                      if r["depth_agreement"] is not None]
        rows.append({
            "q_loss_mode": q_loss_mode,
            "per_mode": per_mode,
            **summarize(records),
            "depth_agreement": (format_mean_std(agreements)
                                if agreements else None),
        })
        logger.info(
            f"Ablation q_loss_mode={q_loss_mode} per_mode={per_mode}: "
            f"accuracy {rows[-1]['test_accuracy']}")
    return rows
