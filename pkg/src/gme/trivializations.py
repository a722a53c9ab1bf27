"""Trivialization maps: flat real parameters onto constraint sets.

Each map turns an unconstrained real vector into a member of its target set
(positive numbers, the probability simplex, unit vectors, Hermitian and
unitary matrices, the Stiefel manifold, and the composite ansatz families
built from them).  The ``*_vjp`` helpers propagate gradients back through a
map; complex cogradients follow the convention

    df = 2 Re[ sum_k conj(g_k) dz_k ],

so for interleaved real parameters x with z_k = x_{2k} + i x_{2k+1} the real
gradient is ``interleave(2 Re g, 2 Im g)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .states import StateError, total_dim

POLAR_EPS = 1e-12  # regularization of the polar projection near rank deficiency


def check_finite(theta):
    theta = np.asarray(theta, dtype=float).ravel()
    if not np.all(np.isfinite(theta)):
        raise StateError("parameters must be finite")
    return theta


# ---------------------------------------------------------------------------
# scalar / vector building blocks


def softplus(t):
    return np.logaddexp(0.0, t)


def softplus_vjp(t, g):
    return g * special.expit(t)


def complex_from_reals(theta):
    """Interleaved real pairs to a complex vector, z_k = x_{2k} + i x_{2k+1}."""
    theta = np.asarray(theta, dtype=float)
    return theta[0::2] + 1j * theta[1::2]


def reals_from_cograd(g):
    """Real-parameter gradient from a complex cogradient."""
    out = np.empty(2 * g.size)
    out[0::2] = 2.0 * g.real
    out[1::2] = 2.0 * g.imag
    return out


def normalize(z):
    return z / np.linalg.norm(z)


def normalize_vjp(z, g):
    """Cogradient through f = z / ||z||."""
    s = np.linalg.norm(z)
    f = z / s
    return (g - f * np.real(np.vdot(f, g))) / s


# ---------------------------------------------------------------------------
# matrix building blocks


def hermitian_from_reals(theta, n):
    """Column-filled real square matrix, then (A + A^T) + i (A - A^T)."""
    a = np.asarray(theta, dtype=float).reshape(n, n, order="F")
    return (a + a.T) + 1j * (a - a.T)


def unitary_from_reals(theta, n):
    h = hermitian_from_reals(theta, n)
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def polar(a, eps=POLAR_EPS):
    """Regularized polar factor A (A^dag A + eps I)^(-1/2)."""
    b = a.conj().T @ a + eps * np.eye(a.shape[1])
    vals, vecs = np.linalg.eigh(b)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return a @ inv_sqrt


def polar_vjp(a, g, eps=POLAR_EPS):
    """Cogradient through the regularized polar factor.

    Uses the Daleckii-Krein divided differences of t -> t^(-1/2) on the
    Gram-matrix eigenbasis.
    """
    b = a.conj().T @ a + eps * np.eye(a.shape[1])
    vals, vecs = np.linalg.eigh(b)
    sq = np.sqrt(vals)
    inv_sqrt = (vecs / sq) @ vecs.conj().T
    # divided differences of t^(-1/2): -1 / (sqrt(di dj) (sqrt(di) + sqrt(dj)))
    w = -1.0 / (np.outer(sq, sq) * (sq[:, None] + sq[None, :]))
    p = a.conj().T @ g
    t = vecs @ (w * (vecs.conj().T @ p @ vecs)) @ vecs.conj().T
    return g @ inv_sqrt + a @ (t + t.conj().T)


# ---------------------------------------------------------------------------
# trivialization kinds


@dataclass(frozen=True)
class Positive:
    n: int = 1
    kind: str = "positive"

    @property
    def input_len(self) -> int:
        return self.n

    def value(self, theta):
        return softplus(check_finite(theta))


@dataclass(frozen=True)
class Simplex:
    n: int
    inner: str = "exp"
    kind: str = "simplex"

    @property
    def input_len(self) -> int:
        return self.n

    def value(self, theta):
        theta = check_finite(theta)
        if self.inner == "exp":
            shifted = np.exp(theta - theta.max())
            return shifted / shifted.sum()
        pos = softplus(theta)
        return pos / pos.sum()


@dataclass(frozen=True)
class Sphere:
    n: int
    kind: str = "sphere"

    @property
    def input_len(self) -> int:
        return self.n

    def value(self, theta):
        return normalize(check_finite(theta))


@dataclass(frozen=True)
class Hermitian:
    n: int
    kind: str = "hermitian"

    @property
    def input_len(self) -> int:
        return self.n * self.n

    def value(self, theta):
        return hermitian_from_reals(check_finite(theta), self.n)


@dataclass(frozen=True)
class Unitary:
    n: int
    kind: str = "unitary"

    @property
    def input_len(self) -> int:
        return self.n * self.n

    def value(self, theta):
        return unitary_from_reals(check_finite(theta), self.n)


@dataclass(frozen=True)
class Stiefel:
    n: int
    r: int
    kind: str = "stiefel"

    @property
    def input_len(self) -> int:
        return 2 * self.n * self.r

    def matrix(self, theta):
        return complex_from_reals(check_finite(theta)).reshape(self.n, self.r)

    def value(self, theta):
        return polar(self.matrix(theta))


@dataclass(frozen=True)
class ProductAnsatz:
    """A fully product state: one normalized complex factor per party."""

    dims: tuple[int, ...]
    kind: str = "product_ansatz"

    @property
    def input_len(self) -> int:
        return 2 * sum(self.dims)

    def factors(self, theta):
        theta = check_finite(theta)
        out, pos = [], 0
        for d in self.dims:
            out.append(normalize(complex_from_reals(theta[pos : pos + 2 * d])))
            pos += 2 * d
        return out

    def value(self, theta):
        vec = np.ones(1, dtype=complex)
        for f in self.factors(theta):
            vec = np.kron(vec, f)
        return vec

    def vjp(self, theta, g):
        """Real-parameter gradient from the cogradient g of the product vector."""
        theta = check_finite(theta)
        factors = self.factors(theta)
        grad = np.zeros(theta.size)
        pos = 0
        for j, d in enumerate(self.dims):
            cog_f = _contract_except(g, self.dims, factors, j)
            raw = complex_from_reals(theta[pos : pos + 2 * d])
            grad[pos : pos + 2 * d] = reals_from_cograd(normalize_vjp(raw, cog_f))
            pos += 2 * d
        return grad


@dataclass(frozen=True)
class BoundedRankAnsatz:
    """Unnormalized sum of k-1 product terms with positive weights.

    For two parties this parameterizes states of Schmidt rank < k; in the
    multipartite case, tensor rank < k.
    """

    dims: tuple[int, ...]
    k: int
    kind: str = "bounded_rank_ansatz"

    def __post_init__(self):
        if self.k < 2:
            raise StateError(f"bounded-rank ansatz needs k >= 2, got {self.k}")

    @property
    def terms(self) -> int:
        return self.k - 1

    @property
    def term_len(self) -> int:
        return 1 + 2 * sum(self.dims)

    @property
    def input_len(self) -> int:
        return self.terms * self.term_len

    def parts(self, theta):
        """Per-term weights and normalized factors: (mu, factors, raw factor params)."""
        theta = check_finite(theta)
        mus, factors = [], []
        pos = 0
        for _ in range(self.terms):
            mus.append(float(softplus(theta[pos])))
            pos += 1
            fs = []
            for d in self.dims:
                fs.append(normalize(complex_from_reals(theta[pos : pos + 2 * d])))
                pos += 2 * d
            factors.append(fs)
        return np.array(mus), factors

    def value(self, theta):
        mus, factors = self.parts(theta)
        vec = np.zeros(total_dim(self.dims), dtype=complex)
        for mu, fs in zip(mus, factors):
            term = np.ones(1, dtype=complex)
            for f in fs:
                term = np.kron(term, f)
            vec += mu * term
        return vec

    def vjp(self, theta, g):
        """Real-parameter gradient from the cogradient g of the summed vector."""
        theta = check_finite(theta)
        mus, factors = self.parts(theta)
        grad = np.zeros(theta.size)
        pos = 0
        for i in range(self.terms):
            fs = factors[i]
            term = np.ones(1, dtype=complex)
            for f in fs:
                term = np.kron(term, f)
            # d(vec) = t_i d(mu_i): real derivative 2 Re <t_i, g>
            grad[pos] = softplus_vjp(theta[pos], 2.0 * np.real(np.vdot(term, g)))
            pos += 1
            for j, d in enumerate(self.dims):
                cog_f = mus[i] * _contract_except(g, self.dims, fs, j)
                raw = complex_from_reals(theta[pos : pos + 2 * d])
                grad[pos : pos + 2 * d] = reals_from_cograd(normalize_vjp(raw, cog_f))
                pos += 2 * d
        return grad


@dataclass(frozen=True)
class RoofAnsatz:
    """Stiefel matrix plus one closest-state ansatz per decomposition entry."""

    n_entries: int
    rank: int
    inner: object  # ProductAnsatz or BoundedRankAnsatz
    kind: str = "roof_ansatz"

    def __post_init__(self):
        if self.n_entries < self.rank:
            raise StateError(
                f"need n_entries >= rank, got {self.n_entries} < {self.rank}"
            )

    @property
    def stiefel(self) -> Stiefel:
        return Stiefel(self.n_entries, self.rank)

    @property
    def input_len(self) -> int:
        return self.stiefel.input_len + self.n_entries * self.inner.input_len

    def split(self, theta):
        theta = check_finite(theta)
        ns = self.stiefel.input_len
        return theta[:ns], theta[ns:].reshape(self.n_entries, self.inner.input_len)

    def value(self, theta):
        th_x, th_inner = self.split(theta)
        x = self.stiefel.value(th_x)
        states = [self.inner.value(t) for t in th_inner]
        return x, states


def _contract_except(g, dims, factors, j):
    """Contract conj(factors) into g on every party except j; returns a d_j vector."""
    v = np.asarray(g).reshape(tuple(dims))
    for axis in reversed(range(len(dims))):
        if axis == j:
            continue
        v = np.tensordot(v, np.conj(factors[axis]), axes=([axis], [0]))
    return v


def trivialize(t, theta):
    """Evaluate a trivialization map at flat parameters theta."""
    return t.value(np.asarray(theta, dtype=float))


def make_trivialization(kind: str, **kwargs):
    table = {
        "positive": Positive,
        "simplex": Simplex,
        "sphere": Sphere,
        "hermitian": Hermitian,
        "unitary": Unitary,
        "stiefel": Stiefel,
        "product_ansatz": ProductAnsatz,
        "bounded_rank_ansatz": BoundedRankAnsatz,
        "roof_ansatz": RoofAnsatz,
    }
    if kind not in table:
        raise StateError(f"unknown trivialization kind {kind!r}")
    return table[kind](**kwargs)
