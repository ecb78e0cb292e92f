import csv
import logging
import math
import os
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from netbuild.graphs import WeightedGraph

logger = logging.getLogger(__name__)

LABELS_FILE = "labels.csv"
DEPTHS_FILE = "depths.csv"


class DatasetFormatError(ValueError):
    """A dataset file that does not follow the on-disk layout."""

    def __init__(self, path: str, line: int, message: str) -> None:
        self.path = path
        self.line = line
        location = f"{path}:{line}" if line else path
        super().__init__(f"{location}: {message}")


def _read_labels(directory: str) -> List[tuple]:
    path = os.path.join(directory, LABELS_FILE)
    if not os.path.isfile(path):
        raise DatasetFormatError(path, 0, "labels file not found")

    labels = []
    seen = set()
    with open(path, "r", newline="") as file:
        for line_number, row in enumerate(csv.reader(file), start=1):
            if not row or not "".join(row).strip():
                continue
            if line_number == 1 and row[0].strip() == "id":
                continue
            if len(row) != 2:
                raise DatasetFormatError(
                    path, line_number,
                    f"expected 'id,label', got {len(row)} fields")
            graph_id, label = row[0].strip(), row[1].strip()
            if label not in ("0", "1"):
                raise DatasetFormatError(
                    path, line_number, f"label must be 0 or 1, got '{label}'")
            if graph_id in seen:
                raise DatasetFormatError(
                    path, line_number, f"duplicate id '{graph_id}'")
            seen.add(graph_id)
            labels.append((graph_id, int(label)))
    if not labels:
        raise DatasetFormatError(path, 0, "no labeled instances")
    return labels


def read_matrix(path: str) -> np.ndarray:
    """Parse one dense comma-separated matrix, one row per line."""
    if not os.path.isfile(path):
        raise DatasetFormatError(path, 0, "matrix file not found")

    rows = []
    with open(path, "r", newline="") as file:
        for line_number, row in enumerate(csv.reader(file), start=1):
            if not row:
                continue
            try:
                values = [float(v) for v in row]
            except ValueError as e:
                raise DatasetFormatError(
                    path, line_number, f"not a number: {e}") from e
            if not all(math.isfinite(v) for v in values):
                raise DatasetFormatError(
                    path, line_number, "non-finite value")
            if rows and len(values) != len(rows[0]):
                raise DatasetFormatError(
                    path, line_number,
                    f"ragged row: {len(values)} values, expected "
                    f"{len(rows[0])}")
            rows.append(values)
    if not rows:
        raise DatasetFormatError(path, 0, "empty matrix")
    if len(rows) != len(rows[0]):
        raise DatasetFormatError(
            path, len(rows),
            f"matrix is {len(rows)}x{len(rows[0])}, expected square")
    return np.array(rows, dtype=np.float64)


def load_dataset(directory: str) -> List[WeightedGraph]:
    """
    Load a dataset directory.

    :param directory: Holds `labels.csv` (id,label) and one `<id>.csv`
        matrix per labeled instance.
    :return: Graphs sorted by id.
    """
    graphs = []
    size = None
    for graph_id, label in sorted(_read_labels(directory)):
        path = os.path.join(directory, f"{graph_id}.csv")
        weights = read_matrix(path)
        if size is not None and weights.shape[0] != size:
            raise DatasetFormatError(
                path, 0,
                f"matrix has {weights.shape[0]} nodes, other instances "
                f"have {size}")
        size = weights.shape[0]
        graphs.append(WeightedGraph(graph_id, weights, label))
    logger.info(
        f"Loaded {len(graphs)} graphs with {size} nodes from {directory}")
    return graphs


def write_matrix_csv(path: str, matrix: np.ndarray) -> None:
    """Write a matrix with repr floats, which read back bit-equal."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        for row in np.asarray(matrix):
            writer.writerow([repr(float(v)) for v in row])


def save_dataset(directory: str, graphs: Sequence[WeightedGraph]) -> None:
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, LABELS_FILE), "w", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(["id", "label"])
        for graph in graphs:
            writer.writerow([graph.graph_id, graph.label])
    for graph in graphs:
        write_matrix_csv(
            os.path.join(directory, f"{graph.graph_id}.csv"), graph.weights)
    logger.info(f"Saved {len(graphs)} graphs to {directory}")


def write_rows_csv(path: str, header: Sequence[str],
                   rows: Iterable[Sequence]) -> None:
    """Plain table output for reports."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def save_depths(directory: str, depths: Dict[str, int]) -> None:
    """Known best depth per instance, for generated datasets."""
    write_rows_csv(os.path.join(directory, DEPTHS_FILE), ["id", "depth"],
                   sorted(depths.items()))


def load_depths(directory: str) -> Optional[Dict[str, int]]:
    """Best depths saved next to a dataset, or None when there are none."""
    path = os.path.join(directory, DEPTHS_FILE)
    if not os.path.isfile(path):
        return None
    depths = {}
    with open(path, "r", newline="") as file:
        for line_number, row in enumerate(csv.reader(file), start=1):
            if line_number == 1 or not row:
                continue
            try:
                depths[row[0].strip()] = int(row[1])
            except (IndexError, ValueError) as e:
                raise DatasetFormatError(
                    path, line_number, "expected 'id,depth'") from e
    return depths
