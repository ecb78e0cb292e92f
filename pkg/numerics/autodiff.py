import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


class NonFiniteError(ValueError):
    """Raised when a NaN or Inf would escape an operation."""


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """
    Convert `data` into an immutable 2-D float64 matrix.

    1-D input becomes a single row. Non-finite entries are rejected.
    """
    matrix = np.array(data, dtype=np.float64)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    elif matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    elif matrix.ndim != 2:
        raise ValueError(
            f"{name} must be 2-D, got an array with shape {matrix.shape}")
    if not np.isfinite(matrix).all():
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    matrix.setflags(write=False)
    return matrix


class Node:
    """
    One value in a differentiable computation graph.

    `parents` are the input nodes of the producing operation and
    `backward_fn` maps the upstream gradient onto one gradient per parent.
    """

    __slots__ = ("value", "grad", "parents", "backward_fn",
                 "requires_grad", "name")

    def __init__(self, value: np.ndarray, parents: Sequence["Node"] = (),
                 backward_fn: Optional[BackwardFn] = None,
                 requires_grad: bool = False,
                 name: Optional[str] = None) -> None:
        self.value = value
        self.grad: Optional[np.ndarray] = None
        self.parents = tuple(parents)
        self.backward_fn = backward_fn
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> Tuple[int, int]:
        return self.value.shape

    def item(self) -> float:
        if self.value.size != 1:
            raise ValueError(
                f"item() needs a 1x1 node, got shape {self.value.shape}")
        return float(self.value[0, 0])

    def backward(self) -> None:
        """Accumulate d(self)/d(node) into every upstream node's `grad`."""
        if self.value.shape != (1, 1):
            raise ValueError(
                f"backward() needs a scalar node, got shape {self.value.shape}")
        order = _topological_order(self)
        self.grad = np.ones_like(self.value)
        for node in reversed(order):
            if node.backward_fn is None or node.grad is None:
                continue
            parent_grads = node.backward_fn(node.grad)
            for parent, grad in zip(node.parents, parent_grads):
                if grad is None or not parent.requires_grad:
                    continue
                if not np.isfinite(grad).all():
                    raise NonFiniteError(
                        f"non-finite gradient flowing into "
                        f"{parent.name or 'intermediate node'}")
                parent.grad = grad if parent.grad is None else parent.grad + grad

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<Node{label} shape={self.value.shape}>"


def _topological_order(root: Node) -> list:
    # Iterative DFS; each node is emitted once, after all its parents
    visited = set()
    order = []
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def _result(op_name: str, value: np.ndarray, parents: Sequence[Node],
            backward_fn: BackwardFn) -> Node:
    if not np.isfinite(value).all():
        raise NonFiniteError(f"{op_name} produced non-finite values")
    value.setflags(write=False)
    requires_grad = any(parent.requires_grad for parent in parents)
    return Node(value, parents,
                backward_fn if requires_grad else None,
                requires_grad=requires_grad)


def constant(data, name: Optional[str] = None) -> Node:
    return Node(as_matrix(data, name or "constant"), name=name)


def parameter(data, name: Optional[str] = None) -> Node:
    return Node(as_matrix(data, name or "parameter"),
                requires_grad=True, name=name)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    for axis in (0, 1):
        if shape[axis] == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_broadcast(op_name: str, a: Node, b: Node) -> None:
    for axis in (0, 1):
        da, db = a.shape[axis], b.shape[axis]
        if da != db and da != 1 and db != 1:
            raise ValueError(
                f"{op_name} shape mismatch: {a.shape} and {b.shape}")


def _check_inner(op_name: str, a: Node, b: Node) -> None:
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"{op_name} shape mismatch: {a.shape[0]}x{a.shape[1]} "
            f"times {b.shape[0]}x{b.shape[1]} "
            f"(inner dimensions {a.shape[1]} != {b.shape[0]})")


def matmul(a: Node, b: Node) -> Node:
    _check_inner("matmul", a, b)

    def backward(grad):
        return grad @ b.value.T, a.value.T @ grad

    return _result("matmul", a.value @ b.value, (a, b), backward)


def sorted_matmul(a: Node, b: Node) -> Node:
    """
    Matrix product whose inner sums run over sorted terms.

    Every entry depends only on the multiset of its products, so reordering
    the inner index, or moving a row of `a`, leaves the values bit-for-bit
    unchanged.
    """
    _check_inner("sorted_matmul", a, b)
    products = a.value[:, :, np.newaxis] * b.value[np.newaxis, :, :]
    value = np.sort(products, axis=1).sum(axis=1)

    def backward(grad):
        return grad @ b.value.T, a.value.T @ grad

    return _result("sorted_matmul", value, (a, b), backward)


def add(a: Node, b: Node) -> Node:
    """Elementwise sum; a 1-row, 1-column or 1x1 operand is broadcast."""
    _check_broadcast("add", a, b)

    def backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return _result("add", a.value + b.value, (a, b), backward)


def sub(a: Node, b: Node) -> Node:
    _check_broadcast("sub", a, b)

    def backward(grad):
        return _unbroadcast(grad, a.shape), -_unbroadcast(grad, b.shape)

    return _result("sub", a.value - b.value, (a, b), backward)


def mul(a: Node, b: Node) -> Node:
    _check_broadcast("mul", a, b)

    def backward(grad):
        return (_unbroadcast(grad * b.value, a.shape),
                _unbroadcast(grad * a.value, b.shape))

    return _result("mul", a.value * b.value, (a, b), backward)


def square(x: Node) -> Node:
    def backward(grad):
        return (2.0 * x.value * grad,)

    return _result("square", x.value * x.value, (x,), backward)


def transpose(x: Node) -> Node:
    def backward(grad):
        return (grad.T,)

    return _result("transpose", np.array(x.value.T), (x,), backward)


def slice_rows(x: Node, start: int, stop: int) -> Node:
    if not 0 <= start < stop <= x.shape[0]:
        raise ValueError(
            f"row slice [{start}:{stop}] out of range for {x.shape[0]} rows")

    def backward(grad):
        full = np.zeros_like(x.value)
        full[start:stop] = grad
        return (full,)

    return _result("slice_rows", np.array(x.value[start:stop]), (x,), backward)


def leaky_relu(x: Node, slope: float) -> Node:
    """max(x, slope*x); the subgradient at 0 is taken from the positive side."""
    if not 0.0 <= slope < 1.0:
        raise ValueError(f"leaky_relu slope must be in [0, 1), got {slope}")
    positive = x.value >= 0.0
    multiplier = np.where(positive, 1.0, slope)

    def backward(grad):
        return (grad * multiplier,)

    return _result("leaky_relu", x.value * multiplier, (x,), backward)


def softmax_row(x: Node, mask: Optional[np.ndarray] = None) -> Node:
    """
    Row-wise softmax restricted to the entries where `mask` is True.

    Masked entries come out as exactly 0. A row with no unmasked entry is
    rejected.
    """
    if mask is None:
        mask = np.ones(x.shape, dtype=bool)
    elif mask.shape != x.shape:
        raise ValueError(
            f"softmax mask shape {mask.shape} does not match {x.shape}")
    empty_rows = np.flatnonzero(~mask.any(axis=1))
    if empty_rows.size:
        raise ValueError(
            f"softmax rows {empty_rows.tolist()} have no unmasked entries")

    masked = np.where(mask, x.value, -np.inf)
    shifted = masked - masked.max(axis=1, keepdims=True)
    exps = np.where(mask, np.exp(shifted), 0.0)
    # Sorted row sums keep the result exact under column reordering
    probs = exps / np.sort(exps, axis=1).sum(axis=1, keepdims=True)

    def backward(grad):
        inner = (grad * probs).sum(axis=1, keepdims=True)
        return (probs * (grad - inner),)

    return _result("softmax_row", probs, (x,), backward)


def dropout(x: Node, rate: float, training: bool,
            rng: Optional[np.random.Generator]) -> Node:
    """Inverted dropout: survivors are scaled by 1/(1-rate) while training."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ValueError("dropout in training mode needs a seeded generator")
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)

    def backward(grad):
        return (grad * keep,)

    return _result("dropout", x.value * keep, (x,), backward)


def mean_rows(x: Node) -> Node:
    """
    Column mean over the rows of `x` (a 1 x cols result).

    Each column is summed in sorted order so the result does not depend on
    the order of the rows.
    """
    rows = x.shape[0]
    if rows < 1:
        raise ValueError("mean_rows needs at least one row")
    value = np.sort(x.value, axis=0).sum(axis=0, keepdims=True) / rows

    def backward(grad):
        return (np.repeat(grad / rows, rows, axis=0),)

    return _result("mean_rows", value, (x,), backward)


def sum_all(x: Node) -> Node:
    def backward(grad):
        return (np.full(x.shape, grad[0, 0]),)

    return _result("sum_all", np.array([[x.value.sum()]]), (x,), backward)


def mean_all(x: Node) -> Node:
    count = x.value.size

    def backward(grad):
        return (np.full(x.shape, grad[0, 0] / count),)

    return _result("mean_all", np.array([[x.value.mean()]]), (x,), backward)


def max_cols(x: Node) -> Node:
    """Per-row maximum (rows x 1); ties route the gradient to the first index."""
    winners = np.argmax(x.value, axis=1)
    rows = np.arange(x.shape[0])

    def backward(grad):
        full = np.zeros_like(x.value)
        full[rows, winners] = grad[:, 0]
        return (full,)

    value = x.value[rows, winners].reshape(-1, 1)
    return _result("max_cols", value, (x,), backward)


def pick(x: Node, columns: Sequence[int]) -> Node:
    """x[i, columns[i]] for every row i (rows x 1)."""
    columns = np.asarray(columns, dtype=np.int64)
    if columns.shape != (x.shape[0],):
        raise ValueError(
            f"pick needs one column per row ({x.shape[0]}), "
            f"got {columns.shape}")
    if columns.min() < 0 or columns.max() >= x.shape[1]:
        raise ValueError(
            f"pick columns must be in [0, {x.shape[1]}), got {columns.tolist()}")
    rows = np.arange(x.shape[0])

    def backward(grad):
        full = np.zeros_like(x.value)
        full[rows, columns] = grad[:, 0]
        return (full,)

    value = x.value[rows, columns].reshape(-1, 1)
    return _result("pick", value, (x,), backward)


def softmax_probabilities(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=-1, keepdims=True)


def cross_entropy(logits: Node, label: int) -> Node:
    """-log softmax(logits)[label] for a single 1 x classes row."""
    classes = logits.shape[1]
    if logits.shape[0] != 1:
        raise ValueError(
            f"cross_entropy expects a single row of logits, got {logits.shape}")
    if not 0 <= label < classes:
        raise ValueError(
            f"label {label} is not a valid class index for {classes} classes")
    row = logits.value[0]
    peak = row.max()
    log_norm = peak + np.log(np.exp(row - peak).sum())
    probs = softmax_probabilities(logits.value)

    def backward(grad):
        onehot = np.zeros_like(logits.value)
        onehot[0, label] = 1.0
        return (grad[0, 0] * (probs - onehot),)

    value = np.array([[log_norm - row[label]]])
    return _result("cross_entropy", value, (logits,), backward)
