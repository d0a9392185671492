"""Gamma-matrix representations, spin generators, tetrads and spinor connections.

Index conventions: ``gammas[a]`` is gamma^a (upper frame index).  Spin
generators are stored as ``I[b, a]`` = I_b^a.  Connection coefficients
``A[lam, b, a]`` are A_lam^b_a.  A tetrad stores ``frame[a, mu]`` = h^mu_a and
``coframe[a, mu]`` = h^a_mu.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .clifford import (
    Signature,
    complexify_map,
    minimal_left_ideal,
    primitive_idempotent,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
NULLSPACE_RTOL = 1e-8


@dataclass(frozen=True)
class GammaRep:
    signature: Signature
    gammas: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.gammas[0].shape[0]

    def lowered(self) -> list[np.ndarray]:
        return [s * g for s, g in zip(self.signature.eta, self.gammas)]

    def clifford_defect(self) -> float:
        return clifford_defect(self.gammas, self.signature.metric())


def clifford_defect(mats: Sequence[np.ndarray], inverse_metric: np.ndarray) -> float:
    """max |A_i A_j + A_j A_i - 2 g^{ij} Id| over all pairs."""
    d = mats[0].shape[0]
    eye = np.eye(d)
    worst = 0.0
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            worst = max(worst, float(np.max(np.abs(a @ b + b @ a - 2 * inverse_metric[i, j] * eye))))
    return worst


def gamma_matrices(sig: Signature) -> GammaRep:
    """Recursive tensor-product construction of gamma matrices for even n.

    Start from (sigma_x, sigma_y); each step n -> n+2 tensors the existing
    matrices with sigma_z and appends Id (x) sigma_x, Id (x) sigma_y.  The last
    ``k`` matrices are finally multiplied by i.
    """
    n = sig.n
    if n % 2:
        raise ValueError("gamma matrices are only constructed for even n")
    gammas = [SIGMA_X, SIGMA_Y]
    for _ in range(n // 2 - 1):
        eye = np.eye(gammas[0].shape[0])
        gammas = [np.kron(g, SIGMA_Z) for g in gammas] + [np.kron(eye, SIGMA_X), np.kron(eye, SIGMA_Y)]
    gammas = [g if a < sig.m else 1j * g for a, g in enumerate(gammas)]
    return GammaRep(sig, tuple(gammas))


def intertwiner_space(rep_a: Sequence[np.ndarray], rep_b: Sequence[np.ndarray], rtol: float = NULLSPACE_RTOL):
    """Solutions of ``Phi A_i = B_i Phi`` for all i.

    Returns ``(dimension, basis)``; the rank decision uses singular values
    below ``rtol`` times the largest one.
    """
    if len(rep_a) != len(rep_b):
        raise ValueError("representations have different numbers of generators")
    d = rep_a[0].shape[0]
    if any(m.shape != (d, d) for m in list(rep_a) + list(rep_b)):
        raise ValueError("matrix dimensions differ")
    eye = np.eye(d)
    # row-major vec: vec(B Phi) = (B kron I) vec(Phi), vec(Phi A) = (I kron A^T) vec(Phi)
    op = np.vstack([np.kron(b, eye) - np.kron(eye, a.T) for a, b in zip(rep_a, rep_b)])
    _, s, vh = np.linalg.svd(op)
    cutoff = rtol * s[0] if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > cutoff)) if cutoff > 0 else 0
    basis = [row.conj().reshape(d, d) for row in vh[rank:]]
    return len(basis), basis


def commutant_dimension(rep: GammaRep | Sequence[np.ndarray]) -> int:
    mats = rep.gammas if isinstance(rep, GammaRep) else rep
    return intertwiner_space(mats, mats)[0]


def direct_sum(rep: GammaRep) -> list[np.ndarray]:
    return [np.kron(np.eye(2), g) for g in rep.gammas]


def left_ideal_gammas(sig: Signature) -> list[np.ndarray]:
    """Generators of Cl(m, k) acting by left multiplication on a minimal left ideal."""
    ideal = minimal_left_ideal(primitive_idempotent(sig.n))
    return [ideal.represent(w) for w in complexify_map(sig)]


@dataclass(frozen=True)
class SpinGenerators:
    signature: Signature
    I: np.ndarray  # (n, n, d, d), I[b, a] = I_b^a

    def lowered(self) -> np.ndarray:
        """I_{ba} = I_b^c eta_{ca}."""
        eta = np.array(self.signature.eta, dtype=float)
        return self.I * eta[None, :, None, None]


def spin_generators(rep: GammaRep) -> SpinGenerators:
    """I_b^a = (gamma_b gamma^a - gamma^a gamma_b) / 4."""
    low = rep.lowered()
    n = rep.signature.n
    d = rep.dim
    out = np.zeros((n, n, d, d), dtype=complex)
    for b in range(n):
        for a in range(n):
            out[b, a] = 0.25 * (low[b] @ rep.gammas[a] - rep.gammas[a] @ low[b])
    return SpinGenerators(rep.signature, out)


def vector_generators(sig: Signature) -> np.ndarray:
    """so(m, k) generators on R^n: (L_b^a)^c_d = delta^c_b delta^a_d - eta^{ac} eta_{bd}."""
    n = sig.n
    eta = np.diag(np.array(sig.eta, dtype=float))
    eye = np.eye(n)
    return np.einsum("cb,ad->bacd", eye, eye) - np.einsum("ac,bd->bacd", eta, eta)


def spinor_image(x: np.ndarray, gens: SpinGenerators) -> np.ndarray:
    """Spinor matrix S of an so(m, k) element X (``X[c, d]`` = X^c_d) with [S, gamma^c] = X^c_d gamma^d."""
    sig = gens.signature
    basis = vector_generators(sig)
    pairs = [(b, a) for b in range(sig.n) for a in range(b + 1, sig.n)]
    mat = np.column_stack([basis[b, a].ravel() for b, a in pairs])
    coeffs, *_ = np.linalg.lstsq(mat, x.ravel(), rcond=None)
    if np.max(np.abs(mat @ coeffs - x.ravel()), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(x))):
        raise ValueError("matrix is not in so(m, k)")
    return -sum(c * gens.I[b, a] for c, (b, a) in zip(coeffs, pairs))


@dataclass(frozen=True)
class Tetrad:
    signature: Signature
    frame: np.ndarray  # [a, mu] = h^mu_a
    coframe: np.ndarray  # [a, mu] = h^a_mu

    @classmethod
    def from_coframe(cls, sig: Signature, coframe: np.ndarray) -> "Tetrad":
        coframe = np.asarray(coframe, dtype=float)
        return cls(sig, np.linalg.inv(coframe).T, coframe)

    def metric(self) -> np.ndarray:
        """g_{mu nu} = eta_{ab} h^a_mu h^b_nu."""
        return self.coframe.T @ self.signature.metric() @ self.coframe

    def completeness_defect(self) -> float:
        return float(np.max(np.abs(self.coframe @ self.frame.T - np.eye(self.signature.n))))


def tetrad_from_metric(g: np.ndarray, sig: Signature | None = None) -> Tetrad:
    """Tetrad from a symmetric eigendecomposition, positive directions first."""
    g = np.asarray(g, dtype=float)
    if np.max(np.abs(g - g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
        raise ValueError("metric is not symmetric")
    lam, q = np.linalg.eigh(g)
    if np.min(np.abs(lam)) < 1e-12:
        raise ValueError("degenerate metric")
    order = np.concatenate([np.where(lam > 0)[0], np.where(lam < 0)[0]])
    m = int(np.sum(lam > 0))
    found = Signature(m, len(lam) - m)
    if sig is not None and sig != found:
        raise ValueError(f"metric has signature {found}, expected {sig}")
    lam, q = lam[order], q[:, order]
    coframe = np.sqrt(np.abs(lam))[:, None] * q.T
    return Tetrad.from_coframe(found, coframe)


def gamma_of_covector(rep: GammaRep, tetrad: Tetrad, t: Sequence[float]) -> np.ndarray:
    """gamma_g(t) = t_mu h^mu_a gamma^a."""
    t = np.asarray(t, dtype=float)
    if t.shape != (rep.signature.n,) or tetrad.frame.shape != (rep.signature.n,) * 2:
        raise ValueError("dimension mismatch")
    coeff = tetrad.frame @ t  # [a] = h^mu_a t_mu
    return sum(c * g for c, g in zip(coeff, rep.gammas))


def covector_gammas(rep: GammaRep, tetrad: Tetrad) -> list[np.ndarray]:
    """gamma_g(dx^mu) for every coordinate covector."""
    eye = np.eye(rep.signature.n)
    return [gamma_of_covector(rep, tetrad, eye[mu]) for mu in range(rep.signature.n)]


def spin_connection_matrix(rep: GammaRep, gens: SpinGenerators, A: np.ndarray) -> np.ndarray:
    """Omega_lam with spinor covariant derivative ``d_lam y + Omega_lam y``.

    Omega_lam = -sum_{b<a} A_lam^b_a I_b^a; for eta-antisymmetric A this is
    half the sum over all ordered pairs.  The sign makes the derivative
    compatible with the gamma matrices: [Omega_lam, gamma^c] = A_lam^c_d gamma^d.
    """
    A = np.asarray(A)
    n = rep.signature.n
    if A.ndim != 3 or A.shape[1:] != (n, n):
        raise ValueError(f"A must have shape (n_base, {n}, {n}), got {A.shape}")
    return -0.5 * np.einsum("lba,baij->lij", A, gens.I)


def vertical_covariant_differential(
    rep: GammaRep,
    gens: SpinGenerators,
    coframe: np.ndarray,
    coframe_jets: np.ndarray,
    Kg: np.ndarray,
    y: np.ndarray,
    y_jets: np.ndarray,
) -> np.ndarray:
    """Covariant differential of a spinor over the bundle of tetrads.

    ``coframe[b, mu]`` = sigma^b_mu, ``coframe_jets[b, mu, lam]`` = d_lam sigma^b_mu,
    ``Kg[lam, mu, nu]`` = K_lam^mu_nu, ``y_jets[lam]`` = d_lam y.  Returns the
    array ``[lam, A]``:

        y_lam + 1/2 (sigma^b_mu sigma^mu_{lam a} - K_lam^mu_nu sigma^b_mu sigma^nu_a) I_b^a y

    where sigma^mu_{lam a} are the frame jets implied by the coframe jets.
    On a tetrad section this equals ``d y + Omega y``.
    """
    coframe = np.asarray(coframe, dtype=float)
    if abs(np.linalg.det(coframe)) < 1e-12:
        raise ValueError("singular coframe")
    frame = np.linalg.inv(coframe)  # [mu, a] = sigma^mu_a
    # d sigma^mu_a = -sigma^mu_c (d sigma^c_nu) sigma^nu_a
    frame_jets = -np.einsum("mc,cnl,na->mal", frame, coframe_jets, frame)
    jet_term = np.einsum("bm,mal->lba", coframe, frame_jets)
    conn_term = np.einsum("lmn,bm,na->lba", Kg, coframe, frame)
    coeff = 0.5 * (jet_term - conn_term)
    return np.asarray(y_jets) + np.einsum("lba,baij,j->li", coeff, gens.I, y)


def gamma_compatibility_defect(
    rep: GammaRep, omega: np.ndarray, frame: np.ndarray, dframe: np.ndarray, Kg: np.ndarray
) -> float:
    """max |d_lam G^mu - K_lam^mu_nu G^nu + [Omega_lam, G^mu]| with G^mu = h^mu_a gamma^a.

    ``frame[a, mu]`` = h^mu_a, ``dframe[a, mu, lam]`` = d_lam h^mu_a.
    """
    gam = np.array(rep.gammas)
    G = np.einsum("am,aij->mij", frame, gam)
    dG = np.einsum("aml,aij->lmij", dframe, gam)
    KG = np.einsum("lmn,nij->lmij", Kg, G)
    comm = np.einsum("lij,mjk->lmik", omega, G) - np.einsum("mij,ljk->lmik", G, omega)
    return float(np.max(np.abs(dG - KG + comm)))


@dataclass(frozen=True)
class SpinConnectionPoint:
    A: np.ndarray
    omega: np.ndarray
    antisymmetry_defect: float
    restriction_defect: float
    compatibility_defect: float


def spin_connection_at(rep: GammaRep, gens: SpinGenerators, metric, Kg, x, rng: np.random.Generator) -> SpinConnectionPoint:
    """Tetrad coefficients, spinor connection and consistency defects at ``x``.

    The restriction defect compares the vertical covariant differential on the
    tetrad section with d y + Omega y for a random linear spinor field y.
    """
    from . import jets as J
    from .fields import TetradField
    from .geometry import lowered_antisymmetry_defect, tetrad_coefficients_from

    x = np.asarray(x, dtype=float)
    n, d = rep.signature.n, rep.dim
    co = TetradField(metric).coframe_jet(x)
    fr = J.inv(co.truncate()).transpose(1, 0)
    K = Kg.at(x)
    A = tetrad_coefficients_from(co.value, fr.value, fr.grad, K)
    omega = spin_connection_matrix(rep, gens, A)
    y = rng.normal(size=d) + 1j * rng.normal(size=d)
    dy = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    vertical = vertical_covariant_differential(rep, gens, co.value, co.grad, K, y, dy)
    direct = dy + np.einsum("lij,j->li", omega, y)
    return SpinConnectionPoint(
        A,
        omega,
        lowered_antisymmetry_defect(A, rep.signature.eta),
        float(np.max(np.abs(vertical - direct))),
        gamma_compatibility_defect(rep, omega, fr.value, fr.grad, K),
    )
