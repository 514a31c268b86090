"""Tests for the scaled conjugate gradient optimiser"""

import numpy as np
import pytest

from app.autodetect.scg import scg_minimize
from app.errors import InvalidInputError, TrainingDivergedError
from app.wavegen.waveforms import make_rng


def _quadratic(dim: int, seed: int):
    rng = make_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    a = q @ np.diag(np.linspace(1.0, 10.0, dim)) @ q.T
    b = rng.standard_normal(dim)

    def fun(x):
        return 0.5 * float(x @ a @ x) - float(b @ x), a @ x - b

    return fun, a, b


def _rosenbrock(x):
    f = 100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2
    g = np.array([
        -400.0 * x[0] * (x[1] - x[0] ** 2) - 2.0 * (1.0 - x[0]),
        200.0 * (x[1] - x[0] ** 2),
    ])
    return f, g


def test_spd_quadratic_converges():
    fun, a, b = _quadratic(20, seed=0)
    result = scg_minimize(fun, np.zeros(20), max_iters=60, grad_tol=1e-6)

    assert result.converged
    assert result.grad_inf_norm < 1e-6
    np.testing.assert_allclose(result.x, np.linalg.solve(a, b), atol=1e-5)


def test_stationary_start():
    fun, a, b = _quadratic(5, seed=1)
    result = scg_minimize(fun, np.linalg.solve(a, b), max_iters=10, grad_tol=1e-6)

    assert result.converged
    assert result.iterations == 1
    assert result.loss_history == [pytest.approx(result.loss)]


def test_loss_never_increases():
    result = scg_minimize(_rosenbrock, np.array([-1.2, 1.0]), max_iters=200, grad_tol=1e-9)

    history = np.array(result.loss_history)
    assert np.all(np.diff(history) <= 0.0)
    assert history[-1] < history[0]
    assert result.history_iterations[0] == 0
    assert len(result.history_iterations) == len(result.loss_history)


def test_rosenbrock_reaches_minimum():
    result = scg_minimize(_rosenbrock, np.array([-1.2, 1.0]), max_iters=2000, grad_tol=1e-8)
    np.testing.assert_allclose(result.x, [1.0, 1.0], atol=1e-3)


def test_budget_is_respected():
    fun, _, _ = _quadratic(20, seed=2)
    result = scg_minimize(fun, np.zeros(20), max_iters=3, grad_tol=1e-12)
    assert result.iterations == 3
    assert not result.converged


def test_non_finite_start():
    def fun(x):
        return float("nan"), np.zeros_like(x)

    with pytest.raises(TrainingDivergedError):
        scg_minimize(fun, np.zeros(3), max_iters=5, grad_tol=1e-6)


def test_invalid_budget():
    fun, _, _ = _quadratic(3, seed=0)
    with pytest.raises(InvalidInputError):
        scg_minimize(fun, np.zeros(3), max_iters=0, grad_tol=1e-6)
