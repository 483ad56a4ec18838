"""Derivative-free maximizers used by the likelihood search."""

import numpy as np
import pytest

from spdclab.errors import InputDomainError
from spdclab.optim import (
    annealed_maximize,
    max_abs_gradient,
    nelder_mead_maximize,
    parabolic_polish,
)


def _quadratic(center):
    c = np.asarray(center, dtype=float)

    def fn(x):
        return -float(np.sum((np.asarray(x) - c) ** 2))

    return fn


def test_simplex_finds_quadratic_maximum():
    fn = _quadratic([1.0, -2.0, 0.5])
    result = nelder_mead_maximize(fn, np.zeros(3), scale=0.5)
    assert result.converged
    assert np.max(np.abs(result.x - [1.0, -2.0, 0.5])) < 1e-4
    assert result.value == pytest.approx(0.0, abs=1e-8)
    assert result.evaluations > 0 and result.restarts_used >= 1


def test_simplex_handles_anisotropic_surface():
    def fn(x):
        return -(100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2)

    result = nelder_mead_maximize(fn, np.array([-1.2, 1.0]), scale=0.5, restarts=8)
    assert np.max(np.abs(result.x - 1.0)) < 1e-3


def test_simplex_requires_a_run():
    with pytest.raises(InputDomainError):
        nelder_mead_maximize(_quadratic([0.0]), np.zeros(1), restarts=0)


def test_simplex_deterministic():
    fn = _quadratic([0.3, 0.7])
    a = nelder_mead_maximize(fn, np.zeros(2))
    b = nelder_mead_maximize(fn, np.zeros(2))
    assert np.array_equal(a.x, b.x) and a.value == b.value
    assert a.evaluations == b.evaluations


def test_annealing_escapes_local_maximum():
    # two peaks: local at x=-1 (height 1), global at x=2 (height 2)
    def fn(x):
        t = float(x[0])
        return np.exp(-4 * (t + 1.0) ** 2) + 2.0 * np.exp(-4 * (t - 2.0) ** 2)

    trapped = nelder_mead_maximize(fn, np.array([-1.1]), scale=0.05)
    assert abs(trapped.x[0] + 1.0) < 0.1  # simplex stays on the nearby peak
    annealed = annealed_maximize(
        fn, np.array([-1.1]), scale=1.0, rng=np.random.default_rng(0)
    )
    assert abs(annealed.x[0] - 2.0) < 1e-3
    assert annealed.value == pytest.approx(2.0, abs=1e-6)


def test_annealing_deterministic_for_seed():
    def fn(x):
        return -float(np.sum(np.asarray(x) ** 2))

    a = annealed_maximize(fn, np.ones(2), rng=np.random.default_rng(3))
    b = annealed_maximize(fn, np.ones(2), rng=np.random.default_rng(3))
    assert np.array_equal(a.x, b.x) and a.evaluations == b.evaluations


def test_gradient_probe_on_quadratic():
    fn = _quadratic([0.0, 0.0])
    grad, evals = max_abs_gradient(fn, np.array([0.5, -0.25]), step=1e-6)
    # d/dx of -(x^2) at 0.5 is -1.0
    assert grad == pytest.approx(1.0, rel=1e-6)
    assert evals == 4
    at_top, _ = max_abs_gradient(fn, np.zeros(2), step=1e-6)
    assert at_top < 1e-9


def test_polish_improves_rough_point():
    fn = _quadratic([0.2, -0.4])
    x0 = np.array([0.21, -0.39])
    x, value, evals, grad_max = parabolic_polish(
        fn, x0, fn(x0), step=1e-4, gradient_tol=1e-10
    )
    assert value > fn(x0)
    assert np.max(np.abs(x - [0.2, -0.4])) < 1e-6
    assert grad_max <= 1e-10
    assert evals > 0


def test_polish_never_decreases_value():
    def fn(x):
        return -abs(float(x[0])) ** 1.5

    x0 = np.array([0.03])
    x, value, _, _ = parabolic_polish(fn, x0, fn(x0), step=1e-3, max_sweeps=5)
    assert value >= fn(x0)
