"""Multi-restart minimization: accuracy, determinism, both methods."""

import numpy as np
import pytest

from gme.optimizers import OptimizerConfig, minimize
from gme.states import StateError
from gme.variational import make_quadratic, make_rayleigh


def test_quadratic_minimum():
    est = minimize(make_quadratic([3.0]), OptimizerConfig(restarts=2))
    assert abs(est.value) < 1e-8
    assert abs(est.best_params[0] - 3.0) < 1e-8


def test_rayleigh_reaches_smallest_eigenvalue(rng):
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = 0.5 * (m + m.conj().T)
    est = minimize(make_rayleigh(h), OptimizerConfig(restarts=4))
    assert abs(est.value - np.linalg.eigvalsh(h)[0]) < 1e-8
    assert est.converged


def test_seeded_determinism(rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = 0.5 * (m + m.conj().T)
    cfg = OptimizerConfig(restarts=3, seed=17)
    a = minimize(make_rayleigh(h), cfg)
    b = minimize(make_rayleigh(h), cfg)
    np.testing.assert_array_equal(a.per_restart_values, b.per_restart_values)
    np.testing.assert_array_equal(a.best_params, b.best_params)
    c = minimize(make_rayleigh(h), cfg.with_(seed=18))
    assert not np.array_equal(a.best_params, c.best_params)


def test_value_is_min_of_restarts(rng):
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    h = 0.5 * (m + m.conj().T)
    est = minimize(make_rayleigh(h), OptimizerConfig(restarts=5))
    assert est.value == est.per_restart_values.min()
    assert est.iterations_used > 0


def test_momentum_method():
    cfg = OptimizerConfig(
        method="momentum", restarts=1, max_iterations=4000, step_size=0.05,
        gradient_tolerance=1e-9,
    )
    est = minimize(make_quadratic([1.0, -1.0]), cfg)
    assert abs(est.value) < 1e-8


def test_config_validation():
    with pytest.raises(StateError):
        OptimizerConfig(restarts=0)
    with pytest.raises(StateError):
        OptimizerConfig(method="adam")
