import logging
from typing import Dict, List, Optional, Sequence

from experiments.pipeline import (RunResult, prepare_splits,
                                  result_from_training, run_pipeline)
from mdp.run_config import MdpConfig, run_seeds
from mdp.trainer import fixed_depth, random_depths, train_with_depths
from netbuild.graphs import INPUT_MODES, WeightedGraph

logger = logging.getLogger(__name__)

BASELINE_KINDS = ("gcn-fixed", "gat-fixed", "gcn-skip", "gat-skip",
                  "random-policy")

SKIP_DEPTH = 3


def run_baseline(kind: str, config: MdpConfig,
                 graphs: Sequence[WeightedGraph],
                 depth: Optional[int] = None,
                 truth: Optional[Dict[str, int]] = None) -> RunResult:
    """
    Train and test one comparison model with the same split, seeds and
    best-validation protocol as the adaptive-depth GNN2.

    Fixed and skip kinds run every instance at `depth` (skip defaults to
    3); the random policy draws depths in 1..b with `config.gnn`.
    """
    if kind not in BASELINE_KINDS:
        raise ValueError(
            f"Invalid baseline kind: {kind}. "
            f"Valid kinds are: {', '.join(BASELINE_KINDS)}")
    if kind.endswith("-fixed") and depth is None:
        raise ValueError(f"Baseline '{kind}' needs a depth")
    if kind.endswith("-skip") and depth is None:
        depth = SKIP_DEPTH
    if depth is not None and depth < 1:
        raise ValueError(f"Baseline depth must be positive, got {depth}")

    seeds = run_seeds(config.seed)
    data = prepare_splits(config, graphs, seeds, with_subject_graph=False)

    if kind == "random-policy":
        gnn_kind = config.gnn
        max_depth = config.actions
        policy = random_depths(
            config.actions,
            per_instance=config.random_policy_mode == "per_instance")
    else:
        gnn_kind = kind.split("-")[0]
        max_depth = depth
        policy = fixed_depth(depth)

    trained = train_with_depths(
        config, data.built,
        depth_policy=policy,
        max_depth=max_depth,
        model_seed=seeds["gnn2_init"],
        train_seed=seeds["train"],
        depth_seed=seeds["depth"],
        phase=kind,
        kind=gnn_kind,
        skip=kind.endswith("-skip"),
    )
    return result_from_training(
        kind, config, trained, truth,
        depth=None if kind == "random-policy" else depth)


def run_depth_grid(config: MdpConfig, graphs: Sequence[WeightedGraph],
                   input_modes: Sequence[str] = INPUT_MODES,
                   truth: Optional[Dict[str, int]] = None) -> List[dict]:
    """
    Fixed-depth accuracy for each (input mode, depth 1..b) and the
    adaptive-depth accuracy per input mode.
    """
    rows = []
    fixed_kind = f"{config.gnn}-fixed"
    for mode in input_modes:
        mode_config = config.with_overrides(input_mode=mode)
        for depth in range(1, config.actions + 1):
            result = run_baseline(fixed_kind, mode_config, graphs, depth)
            rows.append(_grid_row(mode, str(depth), result))
        result = run_pipeline(mode_config, graphs, truth)
        rows.append(_grid_row(mode, "adaptive", result))
        logger.info(f"Depth grid finished input mode '{mode}'")
    return rows


def _grid_row(mode: str, depth: str, result: RunResult) -> dict:
    return {
        "input_mode": mode,
        "depth": depth,
        "test_accuracy": result.test.accuracy,
        "test_auc": result.test.auc,
    }
