from typing import Callable, Dict

import numpy as np

from numerics.autodiff import Node, NonFiniteError, constant, parameter

ScalarFunction = Callable[[Dict[str, Node]], Node]


def _evaluate(f: ScalarFunction, point: Dict[str, np.ndarray]) -> float:
    value = f({name: constant(v, name) for name, v in point.items()}).item()
    if not np.isfinite(value):
        raise NonFiniteError("Function value is not finite during grad check")
    return value


def grad_check(f: ScalarFunction, point: Dict[str, np.ndarray],
               h: float = 1e-6) -> float:
    """
    Compare reverse-mode gradients of `f` against central differences.

    :param f: Builds a 1x1 node from named input nodes.
    :param point: Named matrices at which to check.
    :param h: Finite-difference step.
    :return: max |analytic - numeric| / max(1, |numeric|) over all entries.
    """
    leaves = {name: parameter(value, name) for name, value in point.items()}
    output = f(leaves)
    if not np.isfinite(output.value).all():
        raise NonFiniteError("Function value is not finite during grad check")
    output.backward()

    worst = 0.0
    for name, value in point.items():
        base = np.array(value, dtype=np.float64)
        analytic = leaves[name].grad
        if analytic is None:
            analytic = np.zeros_like(base)
        for index in np.ndindex(base.shape):
            plus, minus = base.copy(), base.copy()
            plus[index] += h
            minus[index] -= h
            # Divide by the realized step, not 2h
            step = plus[index] - minus[index]
            numeric = (
                _evaluate(f, {**point, name: plus})
                - _evaluate(f, {**point, name: minus})
            ) / step
            error = abs(analytic[index] - numeric) / max(1.0, abs(numeric))
            worst = max(worst, error)
    return worst
