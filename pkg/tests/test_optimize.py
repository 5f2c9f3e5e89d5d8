"""Tests on Nelder-Mead simplex descent"""
import math
import numpy as np
import pytest
from measlescast.optimize import nelder_mead


def _rosenbrock(x):
    return float((1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2)


def test_quadratic():
    res = nelder_mead(lambda x: float(np.sum((x - [1.0, -2.0, 0.5]) ** 2)), [0, 0, 0])
    assert res.converged
    np.testing.assert_allclose(res.x, [1.0, -2.0, 0.5], atol=1e-4)
    assert res.fun <= res.initial_fun


def test_rosenbrock():
    res = nelder_mead(_rosenbrock, [-1.2, 1.0])
    assert res.converged
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-3)


def test_iteration_cap():
    res = nelder_mead(_rosenbrock, [-1.2, 1.0], max_iter=5)
    assert not res.converged
    assert res.iterations == 5
    assert res.fun <= res.initial_fun


def test_deterministic():
    first = nelder_mead(_rosenbrock, [-1.2, 1.0])
    second = nelder_mead(_rosenbrock, [-1.2, 1.0])
    assert first.x.tolist() == second.x.tolist()
    assert first.evaluations == second.evaluations


def test_nan_is_worst():
    def func(x):
        return math.nan if x[0] < 0 else float((x[0] - 2.0) ** 2)

    res = nelder_mead(func, [0.5])
    assert res.converged
    assert res.x[0] == pytest.approx(2.0, abs=1e-4)


def test_empty_point():
    res = nelder_mead(lambda x: 3.0, [])
    assert res.converged
    assert res.fun == res.initial_fun == 3.0
    assert res.iterations == 0
