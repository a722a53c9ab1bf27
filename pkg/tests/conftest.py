"""Shared helpers for the test suite."""

import numpy as np
import pytest

from gme.states import DensityMatrix, PureState


def random_pure(dims, rng):
    d = int(np.prod(dims))
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z / np.linalg.norm(z), tuple(dims))


def random_density(dims, rng, rank=None):
    d = int(np.prod(dims))
    rank = rank or d
    m = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = m @ m.conj().T
    return DensityMatrix(m / np.trace(m).real, tuple(dims))


def random_unitary(d, rng):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
