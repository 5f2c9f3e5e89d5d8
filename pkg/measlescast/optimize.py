"""Derivative-free minimization by Nelder-Mead simplex descent."""
from __future__ import annotations

__all__ = ["OptimizeResult", "nelder_mead"]
from dataclasses import dataclass
from typing import TYPE_CHECKING
import numpy as np

from measlescast._log import logger

if TYPE_CHECKING:
    from typing import Callable, Sequence

    Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class OptimizeResult:
    """Outcome of :func:`nelder_mead`.

    :param x: best point found
    :param fun: objective at **x**
    :param initial_fun: objective at the starting point
    :param iterations: simplex iterations performed
    :param evaluations: objective evaluations performed
    :param converged: whether the tolerance was met before the iteration cap
    """

    x: np.ndarray
    fun: float
    initial_fun: float
    iterations: int
    evaluations: int
    converged: bool


def nelder_mead(
    func: Objective,
    x_start: Sequence[float],
    *,
    step: float = 0.1,
    ftol: float = 1e-10,
    max_iter: int = 2000,
    alpha: float = 1.0,
    gamma: float = 2.0,
    rho: float = 0.5,
    sigma: float = 0.5,
) -> OptimizeResult:
    r"""Minimize **func** starting from **x_start**.

    .. code-block:: python

        >>> import numpy as np
        >>> from measlescast.optimize import nelder_mead
        >>>
        >>> res = nelder_mead(lambda x: float(np.sum((x - 1.0) ** 2)), [0.0, 0.0])
        >>> res.converged, np.round(res.x, 3).tolist()
        (True, [1.0, 1.0])
        >>>

    The search is deterministic: ties between vertices keep their previous
    order. It stops once the spread of objective values over the simplex
    falls below **ftol**, or after **max_iter** iterations with
    ``converged=False``.

    :param func: objective taking a 1-d array
    :param x_start: starting point
    :param step: offset of the initial vertices along each axis
    :param ftol: objective spread considered converged
    :param max_iter: iteration cap
    :param alpha: reflection coefficient
    :param gamma: expansion coefficient
    :param rho: contraction coefficient
    :param sigma: shrink coefficient
    :return: best vertex and bookkeeping
    """
    x0 = np.array(x_start, dtype=np.float64)
    dim = len(x0)
    evaluations = 0

    def evaluate(x: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        value = float(func(x))
        return value if not np.isnan(value) else np.inf

    initial_fun = evaluate(x0)
    if dim == 0:
        return OptimizeResult(x0, initial_fun, initial_fun, 0, evaluations, True)

    points = [x0]
    for i in range(dim):
        x = x0.copy()
        x[i] += step
        points.append(x)
    simplex = np.array(points)
    values = np.array([initial_fun] + [evaluate(x) for x in simplex[1:]])

    iterations = 0
    converged = False
    while True:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]

        if np.isfinite(values[-1]) and values[-1] - values[0] < ftol:
            converged = True
            break
        if iterations >= max_iter:
            break
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        # reflection
        xr = centroid + alpha * (centroid - worst)
        fr = evaluate(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue

        # expansion
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = evaluate(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue

        # contraction, outside or inside the simplex
        if fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = evaluate(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (worst - centroid)
            fc = evaluate(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue

        # shrink towards the best vertex
        for i in range(1, dim + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            values[i] = evaluate(simplex[i])

    logger.debug(
        f"nelder-mead stopped after {iterations} iterations "
        f"({evaluations} evaluations), converged={converged}"
    )
    return OptimizeResult(
        x=simplex[0].copy(),
        fun=float(values[0]),
        initial_fun=initial_fun,
        iterations=iterations,
        evaluations=evaluations,
        converged=converged,
    )
