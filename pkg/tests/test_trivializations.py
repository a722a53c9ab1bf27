"""Trivialization maps land on their target sets."""

import numpy as np
import pytest

from gme.states import StateError
from gme.trivializations import (
    BoundedRankAnsatz,
    Hermitian,
    Positive,
    ProductAnsatz,
    RoofAnsatz,
    Simplex,
    Sphere,
    Stiefel,
    Unitary,
    complex_from_reals,
    make_trivialization,
    polar,
    trivialize,
)


def test_positive_at_zero():
    assert abs(Positive(1).value(np.zeros(1))[0] - np.log(2.0)) < 1e-14
    assert abs(trivialize(Positive(1), np.zeros(1))[0] - np.log(2.0)) < 1e-14


def test_sphere_example():
    np.testing.assert_allclose(Sphere(2).value(np.array([3.0, 4.0])), [0.6, 0.8])


def test_simplex_exp_at_zero():
    np.testing.assert_allclose(Simplex(2, inner="exp").value(np.zeros(2)), [0.5, 0.5])
    np.testing.assert_allclose(Simplex(2, inner="softplus").value(np.zeros(2)), [0.5, 0.5])


def test_unitary_at_zero():
    np.testing.assert_allclose(Unitary(3).value(np.zeros(9)), np.eye(3), atol=1e-14)


def test_stiefel_polar_of_scaled_identity():
    theta = np.zeros(2 * 3 * 3)
    theta[0::2] = (2.0 * np.eye(3)).ravel()
    np.testing.assert_allclose(Stiefel(3, 3).value(theta), np.eye(3), atol=1e-10)


@pytest.mark.parametrize(
    "kind,kwargs",
    [
        ("positive", {"n": 4}),
        ("simplex", {"n": 5}),
        ("sphere", {"n": 6}),
        ("hermitian", {"n": 3}),
        ("unitary", {"n": 3}),
        ("stiefel", {"n": 5, "r": 3}),
    ],
)
def test_constraints_at_random_points(kind, kwargs):
    """Every output satisfies the target-set constraints at 1000 random points."""
    t = make_trivialization(kind, **kwargs)
    rng = np.random.default_rng(99)
    for _ in range(1000):
        theta = rng.standard_normal(t.input_len) * rng.uniform(0.2, 5.0)
        out = t.value(theta)
        if kind == "positive":
            assert np.all(out > 0)
        elif kind == "simplex":
            assert np.all(out > 0) and abs(out.sum() - 1.0) < 1e-10
        elif kind == "sphere":
            assert abs(np.linalg.norm(out) - 1.0) < 1e-10
        elif kind == "hermitian":
            assert np.linalg.norm(out - out.conj().T) < 1e-10
        elif kind == "unitary":
            assert np.linalg.norm(out.conj().T @ out - np.eye(kwargs["n"])) < 1e-10
        elif kind == "stiefel":
            assert np.linalg.norm(out.conj().T @ out - np.eye(kwargs["r"])) < 1e-10


def test_ansatz_kinds_land_on_their_sets():
    rng = np.random.default_rng(3)
    prod = ProductAnsatz((2, 3, 2))
    for _ in range(100):
        vec = prod.value(rng.standard_normal(prod.input_len))
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-10
    bounded = BoundedRankAnsatz((3, 4), 3)
    for _ in range(100):
        vec = bounded.value(rng.standard_normal(bounded.input_len))
        s = np.linalg.svd(vec.reshape(3, 4), compute_uv=False)
        assert np.count_nonzero(s > 1e-12) <= 2
    roof = RoofAnsatz(6, 4, BoundedRankAnsatz((2, 2), 2))
    x, states = roof.value(rng.standard_normal(roof.input_len))
    assert np.linalg.norm(x.conj().T @ x - np.eye(4)) < 1e-10
    assert len(states) == 6


def test_polar_minimality_vector_case():
    """For n x 1 input the polar factor is the normalized vector."""
    rng = np.random.default_rng(11)
    a = rng.standard_normal((5, 1)) + 1j * rng.standard_normal((5, 1))
    np.testing.assert_allclose(polar(a), a / np.linalg.norm(a), atol=1e-9)


def test_polar_minimality_sampling():
    """No random Stiefel point beats the polar factor in Frobenius distance."""
    rng = np.random.default_rng(12)
    a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    x_star = polar(a)
    base = np.linalg.norm(x_star - a)
    for _ in range(10_000):
        b = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        x = polar(b)
        assert np.linalg.norm(x - a) >= base - 1e-9


def test_hermitian_parameter_layout():
    """Column-major fill: theta_1..theta_n is the first column."""
    theta = np.arange(1.0, 5.0)
    h = Hermitian(2).value(theta)
    a = theta.reshape(2, 2, order="F")
    np.testing.assert_allclose(h, (a + a.T) + 1j * (a - a.T))


def test_non_finite_parameters_rejected():
    with pytest.raises(StateError):
        Sphere(3).value(np.array([1.0, np.nan, 0.0]))
    with pytest.raises(StateError):
        make_trivialization("no_such_kind")


def test_roof_requires_enough_entries():
    with pytest.raises(StateError):
        RoofAnsatz(3, 4, BoundedRankAnsatz((2, 2), 2))


def test_complex_from_reals_interleaving():
    z = complex_from_reals(np.array([1.0, 2.0, 3.0, 4.0]))
    np.testing.assert_allclose(z, [1 + 2j, 3 + 4j])
