import json
import logging
import os
from typing import Dict, Tuple

import numpy as np

from gnn.model import GnnModel, GnnModelProps

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = "adaptive-depth-checkpoint"
CHECKPOINT_VERSION = 1


def write_checkpoint(path: str, kind: str, header: dict,
                     params: Dict[str, np.ndarray]) -> None:
    """
    Write a versioned text record of named matrices.

    Layout: a magic/version line, one JSON header line (sorted keys), then
    per matrix a `param NAME ROWS COLS` line followed by one line of
    comma-separated floats per row. Floats use repr, which round-trips
    exactly.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    lines = [
        f"{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}",
        json.dumps({"kind": kind, **header}, sort_keys=True),
    ]
    for name in sorted(params):
        matrix = np.asarray(params[name])
        rows, cols = matrix.shape
        lines.append(f"param {name} {rows} {cols}")
        for row in matrix:
            lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w") as file:
        file.write("\n".join(lines) + "\n")
    logger.info(f"Wrote {kind} checkpoint with {len(params)} matrices to {path}")


def read_checkpoint(path: str) -> Tuple[dict, Dict[str, np.ndarray]]:
    """Return (header, params) from a checkpoint written by write_checkpoint."""
    with open(path, "r") as file:
        lines = file.read().splitlines()
    if not lines or lines[0] != f"{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}":
        found = lines[0] if lines else "<empty file>"
        raise ValueError(
            f"{path}: unsupported checkpoint header '{found}', expected "
            f"'{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}'")
    header = json.loads(lines[1])

    params = {}
    cursor = 2
    while cursor < len(lines):
        parts = lines[cursor].split(" ")
        if len(parts) != 4 or parts[0] != "param":
            raise ValueError(
                f"{path}:{cursor + 1}: expected 'param NAME ROWS COLS'")
        name, rows, cols = parts[1], int(parts[2]), int(parts[3])
        body = lines[cursor + 1:cursor + 1 + rows]
        if len(body) != rows:
            raise ValueError(f"{path}: matrix '{name}' is truncated")
        matrix = np.array(
            [[float(v) for v in row.split(",")] for row in body],
            dtype=np.float64).reshape(rows, cols)
        matrix.setflags(write=False)
        params[name] = matrix
        cursor += 1 + rows
    return header, params


def save_model(model: GnnModel, path: str) -> None:
    write_checkpoint(path, "gnn", {"config": model.config()},
                     model.parameters)


def load_model(path: str) -> GnnModel:
    header, params = read_checkpoint(path)
    if header.get("kind") != "gnn":
        raise ValueError(
            f"{path} holds a '{header.get('kind')}' checkpoint, not a GNN")
    model = GnnModel(props=GnnModelProps(**header["config"]))
    model.load_parameters(params)
    return model
