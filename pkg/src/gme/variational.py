"""Variational upper bounds for k-bounded geometric entanglement measures.

Objectives are rational functions of trivialized quantities (overlap ratios
and Rayleigh quotients), so their gradients are written out analytically and
validated against central finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .optimizers import GmeEstimate, Objective, OptimizerConfig, minimize
from .states import (
    DensityMatrix,
    PureState,
    StateError,
    Subspace,
    total_dim,
)
from .trivializations import (
    BoundedRankAnsatz,
    ProductAnsatz,
    RoofAnsatz,
    complex_from_reals,
    polar,
    polar_vjp,
    reals_from_cograd,
)

EIG_CUTOFF = 1e-10       # eigenvalues of a density matrix below this are dropped
ZERO_THRESHOLD = 1e-8    # reported-transition threshold separating optimizer floor from signal


@dataclass(frozen=True)
class _Flat:
    """Identity trivialization for plain Euclidean test objectives."""

    n: int
    kind: str = "flat"

    @property
    def input_len(self) -> int:
        return self.n

    def value(self, theta):
        return np.asarray(theta, dtype=float)


# ---------------------------------------------------------------------------
# registered objectives


def make_quadratic(center) -> Objective:
    c = np.asarray(center, dtype=float).ravel()

    def fun(theta):
        return float(np.sum((theta - c) ** 2))

    def grad(theta):
        return 2.0 * (np.asarray(theta) - c)

    return Objective("quadratic", fun, grad, _Flat(c.size))


@dataclass(frozen=True)
class _SphereComplex:
    """Complex unit vector from interleaved real pairs."""

    d: int
    kind: str = "sphere"

    @property
    def input_len(self) -> int:
        return 2 * self.d

    def value(self, theta):
        z = complex_from_reals(np.asarray(theta, dtype=float))
        return z / np.linalg.norm(z)


def make_rayleigh(h) -> Objective:
    """Sphere-trivialized Rayleigh quotient <phi|H|phi> for Hermitian H."""
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]

    def fun(theta):
        z = complex_from_reals(theta)
        n = float(np.real(np.vdot(z, z)))
        return float(np.real(np.vdot(z, h @ z)) / n)

    def grad(theta):
        z = complex_from_reals(theta)
        n = float(np.real(np.vdot(z, z)))
        f = float(np.real(np.vdot(z, h @ z)) / n)
        g_z = (h @ z - f * z) / n
        return reals_from_cograd(g_z)

    return Objective("rayleigh", fun, grad, _SphereComplex(d))


def make_pure_overlap(psi: PureState, k: int) -> Objective:
    """Negated squared overlap ratio with a rank-(k-1) ansatz; E = 1 + min."""
    ansatz = BoundedRankAnsatz(psi.dims, k)
    target = psi.amplitudes

    def fun(theta):
        phi = ansatz.value(theta)
        c = np.vdot(phi, target)
        n = float(np.real(np.vdot(phi, phi)))
        return float(-(abs(c) ** 2) / n)

    def grad(theta):
        phi = ansatz.value(theta)
        c = np.vdot(phi, target)
        n = float(np.real(np.vdot(phi, phi)))
        g_phi = (abs(c) ** 2 / n**2) * phi - (np.conj(c) / n) * target
        return ansatz.vjp(theta, g_phi)

    return Objective("pure_overlap", fun, grad, ansatz)


def make_subspace_bounded_rank(subspace: Subspace, k: int) -> Objective:
    """Rayleigh quotient of the complement projector over rank-(k-1) states."""
    if len(subspace.dims) != 2:
        raise StateError("bounded-rank subspace objective needs a bipartite layout")
    ansatz = BoundedRankAnsatz(subspace.dims, k)
    proj = subspace.complement.matrix

    def fun(theta):
        phi = ansatz.value(theta)
        n = float(np.real(np.vdot(phi, phi)))
        return float(np.real(np.vdot(phi, proj @ phi)) / n)

    def grad(theta):
        phi = ansatz.value(theta)
        n = float(np.real(np.vdot(phi, phi)))
        f = float(np.real(np.vdot(phi, proj @ phi)) / n)
        g_phi = (proj @ phi - f * phi) / n
        return ansatz.vjp(theta, g_phi)

    return Objective("subspace_bounded_rank", fun, grad, ansatz)


def make_subspace_product(subspace: Subspace) -> Objective:
    """Complement-projector expectation over fully product states."""
    ansatz = ProductAnsatz(subspace.dims)
    proj = subspace.complement.matrix

    def fun(theta):
        phi = ansatz.value(theta)
        return float(np.real(np.vdot(phi, proj @ phi)))

    def grad(theta):
        phi = ansatz.value(theta)
        return ansatz.vjp(theta, proj @ phi)

    return Objective("subspace_product", fun, grad, ansatz)


def _rho_eigendata(rho: DensityMatrix):
    vals, vecs = np.linalg.eigh(rho.matrix)
    keep = vals > EIG_CUTOFF
    vals, vecs = vals[keep], vecs[:, keep]
    lam_tilde = vecs * np.sqrt(vals)
    return lam_tilde, int(vals.size)


def _cached(fun_grad):
    """Split a joint evaluator into (fun, grad) sharing one cached evaluation."""
    cache = {"theta": None, "out": None}

    def lookup(theta):
        theta = np.asarray(theta, dtype=float)
        if cache["theta"] is None or not np.array_equal(cache["theta"], theta):
            cache["theta"] = theta.copy()
            cache["out"] = fun_grad(theta)
        return cache["out"]

    return (lambda t: lookup(t)[0]), (lambda t: lookup(t)[1])


def _normalize_rows_vjp(raw, unit, norms, cog):
    """Vectorized normalization cogradient over the last axis."""
    inner = np.real(np.sum(np.conj(unit) * cog, axis=-1, keepdims=True))
    return (cog - unit * inner) / norms[..., None]


def _interleave(cog):
    out = np.empty(cog.shape[:-1] + (2 * cog.shape[-1],))
    out[..., 0::2] = 2.0 * cog.real
    out[..., 1::2] = 2.0 * cog.imag
    return out


def _make_mixed_roof_bipartite(rho: DensityMatrix, k: int, n_entries: int) -> Objective:
    """Vectorized joint objective for bipartite convex roofs."""
    from scipy.special import expit

    lam_tilde, rank = _rho_eigendata(rho)
    if n_entries < rank:
        raise StateError(f"n_entries={n_entries} below rank {rank}")
    d_a, d_b = rho.dims
    inner = BoundedRankAnsatz(rho.dims, k)
    ansatz = RoofAnsatz(n_entries, rank, inner)
    stf = ansatz.stiefel
    terms = k - 1

    def fun_grad(theta):
        th_x, th_inner = ansatz.split(theta)
        a_mat = stf.matrix(th_x)
        x = polar(a_mat)
        psit3 = (lam_tilde @ x.T).T.reshape(n_entries, d_a, d_b)

        r3 = th_inner.reshape(n_entries, terms, 1 + 2 * (d_a + d_b))
        mu_raw = r3[:, :, 0]
        a_raw = r3[:, :, 1 : 1 + 2 * d_a]
        b_raw = r3[:, :, 1 + 2 * d_a :]
        az = a_raw[..., 0::2] + 1j * a_raw[..., 1::2]
        bz = b_raw[..., 0::2] + 1j * b_raw[..., 1::2]
        na = np.linalg.norm(az, axis=-1)
        nb = np.linalg.norm(bz, axis=-1)
        ah = az / na[..., None]
        bh = bz / nb[..., None]
        mu = np.logaddexp(0.0, mu_raw)

        phi = np.einsum("nt,nta,ntb->nab", mu, ah, bh)
        c = np.einsum("nab,nab->n", phi.conj(), psit3)
        nn = np.einsum("nab,nab->n", phi.conj(), phi).real
        val = float(-np.sum(np.abs(c) ** 2 / nn))

        w1 = (np.abs(c) ** 2 / nn**2)[:, None, None]
        w2 = (np.conj(c) / nn)[:, None, None]
        g_phi = w1 * phi - w2 * psit3
        g_psit3 = -(c / nn)[:, None, None] * phi
        g_x = (lam_tilde.conj().T @ g_psit3.reshape(n_entries, d_a * d_b).T).T
        g_a_mat = polar_vjp(a_mat, g_x)

        g_mu = 2.0 * np.einsum("nta,ntb,nab->nt", ah.conj(), bh.conj(), g_phi).real
        g_mu *= expit(mu_raw)
        g_ah = mu[..., None] * np.einsum("ntb,nab->nta", bh.conj(), g_phi)
        g_bh = mu[..., None] * np.einsum("nta,nab->ntb", ah.conj(), g_phi)
        g_az = _normalize_rows_vjp(az, ah, na, g_ah)
        g_bz = _normalize_rows_vjp(bz, bh, nb, g_bh)

        g_inner = np.empty_like(r3)
        g_inner[:, :, 0] = g_mu
        g_inner[:, :, 1 : 1 + 2 * d_a] = _interleave(g_az)
        g_inner[:, :, 1 + 2 * d_a :] = _interleave(g_bz)

        out = np.empty(theta.size)
        out[: stf.input_len] = reals_from_cograd(g_a_mat.ravel())
        out[stf.input_len :] = g_inner.ravel()
        return val, out

    fun, grad = _cached(fun_grad)
    return Objective("mixed_roof", fun, grad, ansatz)


def make_mixed_roof(rho: DensityMatrix, inner, n_entries: int) -> Objective:
    """Joint Stiefel-decomposition / closest-state objective; E = 1 + min."""
    if isinstance(inner, BoundedRankAnsatz) and len(rho.dims) == 2:
        return _make_mixed_roof_bipartite(rho, inner.k, n_entries)
    lam_tilde, rank = _rho_eigendata(rho)
    if n_entries < rank:
        raise StateError(f"n_entries={n_entries} below rank {rank}")
    ansatz = RoofAnsatz(n_entries, rank, inner)
    stf = ansatz.stiefel

    def _parts(theta):
        th_x, th_inner = ansatz.split(theta)
        a = stf.matrix(th_x)
        x = polar(a)
        psit = lam_tilde @ x.T  # column i: sum_j X_ij |lam_j~>
        phis = [inner.value(t) for t in th_inner]
        return th_x, th_inner, a, x, psit, phis

    def fun(theta):
        _, _, _, _, psit, phis = _parts(theta)
        total = 0.0
        for i, phi in enumerate(phis):
            c = np.vdot(phi, psit[:, i])
            n = float(np.real(np.vdot(phi, phi)))
            total -= abs(c) ** 2 / n
        return float(total)

    def grad(theta):
        th_x, th_inner, a, x, psit, phis = _parts(theta)
        g_psit = np.zeros_like(psit)
        grads_inner = []
        for i, phi in enumerate(phis):
            psi_i = psit[:, i]
            c = np.vdot(phi, psi_i)
            n = float(np.real(np.vdot(phi, phi)))
            g_phi = (abs(c) ** 2 / n**2) * phi - (np.conj(c) / n) * psi_i
            grads_inner.append(inner.vjp(th_inner[i], g_phi))
            g_psit[:, i] = -(c / n) * phi
        g_x = (lam_tilde.conj().T @ g_psit).T
        g_a = polar_vjp(a, g_x)
        out = np.empty(theta.size)
        out[: stf.input_len] = reals_from_cograd(g_a.ravel())
        out[stf.input_len :] = np.concatenate(grads_inner)
        return out

    return Objective("mixed_roof", fun, grad, ansatz)


_REGISTRY = (
    "quadratic",
    "rayleigh",
    "pure_overlap",
    "subspace_bounded_rank",
    "subspace_product",
    "mixed_roof",
)


def gradient(objective: Objective, theta) -> np.ndarray:
    """Analytic gradient of a registered objective at flat parameters theta."""
    if not isinstance(objective, Objective) or objective.name not in _REGISTRY:
        raise StateError("objective is not registered with the variational engine")
    return np.asarray(objective.grad(np.asarray(theta, dtype=float)))


# ---------------------------------------------------------------------------
# measures


def _as_gme(est: GmeEstimate, offset: float) -> GmeEstimate:
    per = np.clip(offset + est.per_restart_values, 0.0, None)
    best = int(np.argmin(per))
    return GmeEstimate(
        value=float(per[best]),
        best_params=est.best_params,
        per_restart_values=per,
        converged=est.converged,
        iterations_used=est.iterations_used,
    )


def kgme_pure_multipartite(
    psi: PureState, k: int, config: OptimizerConfig | None = None
) -> GmeEstimate:
    """Upper bound on the k-bounded tensor-rank geometric measure of a pure state."""
    if k < 2:
        raise StateError("k must be >= 2")
    est = minimize(make_pure_overlap(psi, k), config)
    return _as_gme(est, 1.0)


def kgme_subspace(
    subspace: Subspace, k: int, config: OptimizerConfig | None = None
) -> GmeEstimate:
    """Upper bound on the minimal k-bounded measure over a bipartite subspace."""
    if k < 2:
        raise StateError("k must be >= 2")
    est = minimize(make_subspace_bounded_rank(subspace, k), config)
    return _as_gme(est, 0.0)


def gme_subspace_multipartite(
    subspace: Subspace, config: OptimizerConfig | None = None
) -> GmeEstimate:
    """Upper bound on the fully-product geometric measure of a subspace."""
    est = minimize(make_subspace_product(subspace), config)
    return _as_gme(est, 0.0)


def default_n_entries(rho: DensityMatrix) -> int:
    _, rank = _rho_eigendata(rho)
    return min(rank * rank, total_dim(rho.dims) ** 2)


def kgme_mixed(
    rho: DensityMatrix,
    k: int,
    n_entries: int | None = None,
    config: OptimizerConfig | None = None,
) -> GmeEstimate:
    """Convex-roof upper bound on the k-bounded Schmidt-number measure."""
    if len(rho.dims) != 2:
        raise StateError("kgme_mixed needs a bipartite layout")
    if k < 2:
        raise StateError("k must be >= 2")
    n_entries = default_n_entries(rho) if n_entries is None else int(n_entries)
    inner = BoundedRankAnsatz(rho.dims, k)
    est = minimize(make_mixed_roof(rho, inner, n_entries), config)
    return _as_gme(est, 1.0)


def gme_mixed_multipartite(
    rho: DensityMatrix,
    n_entries: int | None = None,
    config: OptimizerConfig | None = None,
) -> GmeEstimate:
    """Convex-roof upper bound with fully product closest states."""
    n_entries = default_n_entries(rho) if n_entries is None else int(n_entries)
    inner = ProductAnsatz(rho.dims)
    est = minimize(make_mixed_roof(rho, inner, n_entries), config)
    return _as_gme(est, 1.0)


def range_subspace(rho: DensityMatrix) -> Subspace:
    """The span of the eigenvectors of rho with eigenvalue above the cutoff."""
    vals, vecs = np.linalg.eigh(rho.matrix)
    states = [
        PureState(vecs[:, i], rho.dims) for i in range(vals.size) if vals[i] > EIG_CUTOFF
    ]
    return Subspace.from_states(states)


def range_lower_bound(
    rho: DensityMatrix, k: int, config: OptimizerConfig | None = None
) -> float:
    """Lower bound on the mixed-state measure: the k-GME of the range of rho."""
    return kgme_subspace(range_subspace(rho), k, config).value


def roof_truncation_value(rho: DensityMatrix, k: int, x: np.ndarray) -> float:
    """Roof value for a fixed Stiefel matrix, inner maximization solved exactly.

    For each decomposition entry the optimal rank-(k-1) state is the truncated
    Schmidt expansion, so the entry contributes its tail singular-value mass.
    Cross-check oracle for the joint parameterization; non-smooth at spectral
    degeneracies, hence not used as an optimizer path.
    """
    lam_tilde, rank = _rho_eigendata(rho)
    x = np.asarray(x, dtype=complex)
    if x.shape[1] != rank:
        raise StateError(f"Stiefel matrix must have {rank} columns")
    d_a, d_b = rho.dims
    psit = lam_tilde @ x.T
    total = 0.0
    for i in range(x.shape[0]):
        s = np.linalg.svd(psit[:, i].reshape(d_a, d_b), compute_uv=False)
        total += float((s[k - 1 :] ** 2).sum())
    return total


@dataclass(frozen=True)
class PerturbationReport:
    min_value: float
    mean_value: float
    values: np.ndarray


def perturbation_experiment(
    subspace: Subspace,
    k: int,
    norm_bound: float,
    trials: int,
    seed: int,
    config: OptimizerConfig | None = None,
) -> PerturbationReport:
    """k-GME statistics of the subspace after random unitary kicks exp(-iH).

    H is a Gaussian Hermitian matrix rescaled to the requested operator norm.
    """
    if norm_bound < 0:
        raise StateError("norm_bound must be non-negative")
    d = total_dim(subspace.dims)
    values = []
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        if norm_bound == 0.0:
            u = np.eye(d, dtype=complex)
        else:
            m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            h = 0.5 * (m + m.conj().T)
            h *= norm_bound / np.max(np.abs(np.linalg.eigvalsh(h)))
            vals, vecs = np.linalg.eigh(h)
            u = (vecs * np.exp(-1j * vals)) @ vecs.conj().T
        kicked = [
            PureState(u @ s.amplitudes, subspace.dims) for s in subspace.spanning_states
        ]
        values.append(kgme_subspace(Subspace.from_states(kicked), k, config).value)
    values = np.asarray(values)
    return PerturbationReport(float(values.min()), float(values.mean()), values)
