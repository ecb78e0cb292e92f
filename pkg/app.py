#!/usr/bin/env python3

import argparse
import logging
import os
import sys
from typing import List, Optional

from config.config import (OUTPUT_PATHS_FILE, load_configurations,
                           load_run_config)
from config.path_builder import PathBuilder
from experiments.baselines import BASELINE_KINDS, run_depth_grid
from experiments.dataset_io import (load_dataset, load_depths, save_dataset,
                                    save_depths, write_matrix_csv,
                                    write_rows_csv)
from experiments.pipeline import evaluate_checkpoints, write_results
from experiments.sweep import (SWEEP_PARAMETERS, SweepSpec,
                               run_mode_ablation, run_repetitions, run_sweep,
                               summarize)
from experiments.synthetic import SyntheticSpec, generate_synthetic
from gnn.model import GNN_KINDS
from mdp.run_config import PER_MODES
from netbuild.graphs import (INPUT_MODES, build_graph, graph_statistics,
                             summarize_statistics)
from policy.qnetwork import LOSS_MODES

logger = logging.getLogger("app")

# CLI flag -> run configuration key
FLAG_KEYS = {
    "gnn": "gnn",
    "b": "actions",
    "k": "k",
    "dim": "dimension",
    "timesteps": "timesteps",
    "gamma": "gamma",
    "window": "window",
    "seed": "seed",
    "reps": "reps",
    "input_mode": "input_mode",
    "epochs": "epochs",
    "workers": "workers",
    "q_loss_mode": "q_loss_mode",
    "per_mode": "per_mode",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="app.py",
        description="Adaptive-depth graph classification with a learned "
                    "depth policy")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Flags shared by every run-producing subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", help="Dataset directory")
    common.add_argument("--out", default="runs", help="Output directory")
    common.add_argument("--config", help="YAML file with run keys")
    common.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--gnn", choices=GNN_KINDS)
    common.add_argument("--b", type=int, help="Number of actions (depths)")
    common.add_argument("--k", type=int, help="KNN neighbors per node")
    common.add_argument("--dim", type=int, help="Hidden dimension d")
    common.add_argument("--timesteps", type=int)
    common.add_argument("--gamma", type=float)
    common.add_argument("--window", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--reps", type=int)
    common.add_argument("--input-mode", choices=INPUT_MODES)
    common.add_argument("--epochs", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--q-loss-mode", choices=LOSS_MODES)
    common.add_argument("--per-mode", choices=PER_MODES)

    subparsers.add_parser(
        "build", parents=[common],
        help="Build adjacencies and dump them as CSV matrices")
    subparsers.add_parser(
        "train", parents=[common],
        help="Run the full pipeline for --reps seeds")

    baseline = subparsers.add_parser(
        "baseline", parents=[common], help="Run a comparison model")
    baseline.add_argument("--kind", required=True, choices=BASELINE_KINDS)
    baseline.add_argument("--depth", type=int)

    sweep = subparsers.add_parser(
        "sweep", parents=[common], help="Hyperparameter sensitivity sweep")
    sweep.add_argument("--param", required=True,
                       choices=list(SWEEP_PARAMETERS))
    sweep.add_argument("--values", required=True,
                       help="Comma-separated positive integers")

    generate = subparsers.add_parser(
        "generate", parents=[common], help="Write a synthetic dataset")
    generate.add_argument("--m", type=int)
    generate.add_argument("--n", type=int)
    generate.add_argument("--p2", type=float)
    generate.add_argument("--noise", type=float)

    evaluate = subparsers.add_parser(
        "eval", parents=[common], help="Score saved checkpoints")
    evaluate.add_argument("--policy", required=True,
                          help="Policy checkpoint")
    evaluate.add_argument("--model", required=True,
                          help="GNN2 checkpoint")

    subparsers.add_parser(
        "grid", parents=[common],
        help="Fixed depths vs adaptive depth for every input mode")
    subparsers.add_parser(
        "ablate", parents=[common],
        help="Adaptive runs under every Q-loss form and PER mode")
    return parser


def _run_config(args):
    overrides = {key: getattr(args, flag) for flag, key in FLAG_KEYS.items()}
    return load_run_config(args.config, overrides)


def _require_dataset(args):
    if not args.dataset:
        raise ValueError(f"'{args.command}' needs --dataset")
    return load_dataset(args.dataset)


def _paths(args, run_name: str = "") -> PathBuilder:
    return PathBuilder(args.out, run_name, OUTPUT_PATHS_FILE)


def command_generate(args) -> None:
    # Load the synthetic defaults within ./config/config.yaml
    defaults = load_configurations()["config"]["synthetic"]
    config = _run_config(args)
    spec = SyntheticSpec(**{
        **defaults,
        **{key: getattr(args, key) for key in ("m", "n", "p2", "noise")
           if getattr(args, key) is not None},
        "k": args.k if args.k is not None else defaults["k"],
        "seed": config.seed,
    })
    dataset = generate_synthetic(spec)
    save_dataset(args.out, dataset.graphs)
    save_depths(args.out, dataset.depths)


def command_build(args) -> None:
    config = _run_config(args)
    graphs = _require_dataset(args)
    paths = _paths(args)
    directory = paths.get_output_path("built", "matrices")

    # Dump the built matrices and collect their statistics
    built_stats, raw_stats = [], []
    for graph in graphs:
        built = build_graph(graph, config.k, config.input_mode,
                            config.binary_edges)
        raw = build_graph(graph, config.k, "raw")
        write_matrix_csv(
            os.path.join(directory, f"{graph.graph_id}_adjacency.csv"),
            built.adjacency)
        write_matrix_csv(
            os.path.join(directory, f"{graph.graph_id}_aggregation.csv"),
            built.aggregation)
        built_stats.append(graph_statistics(built))
        raw_stats.append(graph_statistics(raw))

    write_rows_csv(
        paths.get_output_path("built", "statistics"),
        ["graph_id", "density", "mean_degree", "mean_confidence",
         "raw_density"],
        [(b.graph_id, b.density, b.mean_degree, b.mean_confidence,
          r.density) for b, r in zip(built_stats, raw_stats)])
    logger.info(f"Built graphs: {summarize_statistics(built_stats)}")
    logger.info(f"Raw graphs: {summarize_statistics(raw_stats)}")


def _write_records(args, records: List[dict], kind: str) -> None:
    paths = _paths(args)
    write_results(paths.get_output_path("results", "records"), records)
    summary = summarize(records)
    write_rows_csv(
        paths.get_output_path("results", "table"),
        ["kind", "runs", "test_accuracy", "test_auc"],
        [(kind, summary["runs"], summary["test_accuracy"],
          summary["test_auc"])])
    logger.info(
        f"{kind}: accuracy {summary['test_accuracy']}, "
        f"AUC {summary['test_auc']} over {summary['runs']} runs")


def command_train(args) -> None:
    config = _run_config(args)
    graphs = _require_dataset(args)
    records = run_repetitions(
        config, graphs, truth=load_depths(args.dataset),
        out_dir=args.out, paths_file=OUTPUT_PATHS_FILE)
    _write_records(args, records, f"bn-{config.gnn}")


def command_baseline(args) -> None:
    config = _run_config(args)
    graphs = _require_dataset(args)
    records = run_repetitions(
        config, graphs, kind=args.kind, depth=args.depth,
        truth=load_depths(args.dataset))
    _write_records(args, records, args.kind)


def command_sweep(args) -> None:
    config = _run_config(args)
    graphs = _require_dataset(args)
    try:
        values = tuple(int(v) for v in args.values.split(","))
    except ValueError as e:
        raise ValueError(
            f"Invalid --values '{args.values}', expected integers") from e

    spec = SweepSpec(param=args.param, values=values, repetitions=config.reps)
    rows = [row.to_record() for row in run_sweep(spec, config, graphs)]
    paths = _paths(args)
    write_results(paths.get_output_path("results", "records"), rows)
    write_rows_csv(
        paths.get_output_path("results", "table"),
        ["param", "value", "accuracy", "auc_mean", "auc_std"],
        [(r["param"], r["value"], r["accuracy"], r["auc_mean"], r["auc_std"])
         for r in rows])


def command_eval(args) -> None:
    config = _run_config(args)
    graphs = _require_dataset(args)
    result = evaluate_checkpoints(config, graphs, args.policy, args.model)
    record = {"seed": config.seed, **result.to_record()}
    write_results(_paths(args).get_output_path("results", "records"), [record])
    logger.info(f"Checkpoint test accuracy {result.accuracy:.3f}, "
                f"AUC {result.auc}")


def command_grid(args) -> None:
    config = _run_config(args)
    graphs = _require_dataset(args)
    rows = run_depth_grid(config, graphs, truth=load_depths(args.dataset))
    paths = _paths(args)
    write_results(paths.get_output_path("results", "records"), rows)
    write_rows_csv(
        paths.get_output_path("results", "table"),
        ["input_mode", "depth", "test_accuracy", "test_auc"],
        [(r["input_mode"], r["depth"], r["test_accuracy"], r["test_auc"])
         for r in rows])


def command_ablate(args) -> None:
    config = _run_config(args)
    graphs = _require_dataset(args)
    rows = run_mode_ablation(config, graphs, truth=load_depths(args.dataset))
    paths = _paths(args)
    write_results(paths.get_output_path("results", "records"), rows)
    write_rows_csv(
        paths.get_output_path("results", "table"),
        ["q_loss_mode", "per_mode", "runs", "test_accuracy", "test_auc",
         "depth_agreement"],
        [(r["q_loss_mode"], r["per_mode"], r["runs"], r["test_accuracy"],
          r["test_auc"], r["depth_agreement"]) for r in rows])


COMMANDS = {
    "build": command_build,
    "train": command_train,
    "baseline": command_baseline,
    "sweep": command_sweep,
    "generate": command_generate,
    "eval": command_eval,
    "grid": command_grid,
    "ablate": command_ablate,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    # Load the logging configuration within ./config/config.yaml
    logging_config = load_configurations()["config"]["logging"]
    logging.basicConfig(
        level=args.log_level or logging_config["level"],
        format=logging_config["format"])

    try:
        COMMANDS[args.command](args)
    except ValueError as e:
        logger.error(str(e))
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
