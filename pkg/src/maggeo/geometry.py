"""Tensor calculus for metrics and general linear connections.

Sign conventions are the ones of the metric-affine formalism this package
implements, which differ from most textbooks:

* Christoffel symbols ``{_mu nu alpha} = -1/2 (d_mu g_{nu alpha} + d_alpha g_{nu mu} - d_nu g_{mu alpha})``
* Levi-Civita coefficients ``K_lam^mu_nu = g^{mu beta} {_lam beta nu} = -Gamma^mu_{lam nu}``
* curvature ``R_{lam mu}^alpha_beta = -Riem^alpha_{beta lam mu}`` (textbook Riemann tensor)

Index layouts: ``K[lam, mu, nu] = K_lam^mu_nu``; for a jet ``g`` of the
metric ``g.grad[nu, alpha, mu] = d_mu g_{nu alpha}``; connection derivatives
``dK[mu, alpha, beta, lam] = d_lam K_mu^alpha_beta``; the jet coordinates
``k_{lam mu}^alpha_beta`` are stored derivative-index-first,
``kj[lam, mu, alpha, beta]``.

The ``*_from`` helpers take arrays or jets; the public operations take
fields and a point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as J
from .fields import MetricField, TensorField, TetradField
from .jets import Jet, einsum

ANTISYMMETRY_TOL = 1e-12


def christoffel_lower_from(dg):
    """{_mu nu alpha} from dg[nu, alpha, mu] = d_mu g_{nu alpha}."""
    return -0.5 * (einsum("nam->mna", dg) + einsum("nma->mna", dg) - einsum("man->mna", dg))


def levi_civita_from(g, dg):
    ginv = J.inv(g)
    return einsum("mb,lbn->lmn", ginv, christoffel_lower_from(dg))


def levi_civita(g: Jet) -> Jet:
    """Levi-Civita coefficients as an order-1 jet from an order-2 metric jet."""
    return levi_civita_from(g.truncate(), g.partial())


def lower(g, K):
    """K_{mu nu alpha} = g_{nu beta} K_mu^beta_alpha."""
    return einsum("nb,mba->mna", g, K)


def raise_middle(g, K_low):
    return einsum("bn,mna->mba", J.inv(g), K_low)


def torsion_from(K):
    """T_mu^nu_lam = K_mu^nu_lam - K_lam^nu_mu."""
    return K - einsum("lnm->mnl", K)


def curvature_from(K, dK):
    """R_{lam mu}^alpha_beta from K and dK[mu, alpha, beta, lam] = d_lam K_mu^alpha_beta."""
    # grouped so that antisymmetry in lam <-> mu holds exactly in floating point
    return (einsum("mabl->lmab", dK) - einsum("labm->lmab", dK)) + _quadratic(K)


def _quadratic(K):
    """K_lam^g_beta K_mu^alpha_g - K_mu^g_beta K_lam^alpha_g."""
    return einsum("lgb,mag->lmab", K, K) - einsum("mgb,lag->lmab", K, K)


def nonmetricity_from(g, dg, K):
    """C_{mu nu alpha} = d_mu g_{nu alpha} + K_{mu nu alpha} + K_{mu alpha nu}."""
    K_low = lower(g, K)
    return einsum("nam->mna", dg) + (K_low + einsum("man->mna", K_low))


def contorsion_from(g, dg, K):
    """S_{mu nu alpha} = 1/2 (T_{nu mu alpha} + T_{nu alpha mu} + T_{mu nu alpha} + C_{alpha nu mu} - C_{nu alpha mu})."""
    T = lower(g, torsion_from(K))
    C = nonmetricity_from(g, dg, K)
    return 0.5 * (
        einsum("nma->mna", T)
        + einsum("nam->mna", T)
        + T
        + einsum("anm->mna", C)
        - einsum("nam->mna", C)
    )


def torsion_combination(T_low):
    """1/2 (T_{nu mu alpha} + T_{nu alpha mu} + T_{mu nu alpha})."""
    return 0.5 * (einsum("nma->mna", T_low) + einsum("nam->mna", T_low) + T_low)


def metric_connection_from(g: Jet, T) -> Jet:
    """Metric connection K^g_lam^mu_nu with torsion T_mu^nu_lam, from an order-2 metric jet."""
    g1 = g.truncate()
    K_low = christoffel_lower_from(g.partial()) + torsion_combination(lower(g1, T))
    return raise_middle(g1, K_low)


def jet_splitting_from(k, kj):
    """Canonical split of connection jets: returns (R_part, S_part) with R + S = 2 kj."""
    swapped = einsum("mlab->lmab", kj)
    quad = _quadratic(k)
    return (kj - swapped) + quad, (kj + swapped) - quad


def jets_of(K: Jet) -> np.ndarray:
    """k_{lam mu}^alpha_beta = d_lam K_mu^alpha_beta in jet-coordinate layout."""
    return np.einsum("mabl->lmab", K.grad)


# public pointwise operations


def _metric_jet(g: MetricField, x) -> Jet:
    return g.jet(x)


def christoffel_lower(g: MetricField, x) -> np.ndarray:
    return christoffel_lower_from(_metric_jet(g, x).grad)


def torsion(Kf: TensorField, x) -> np.ndarray:
    return torsion_from(Kf.at(x))


def curvature(Kf: TensorField, x) -> np.ndarray:
    K = Kf.jet(x)
    return curvature_from(K.value, K.grad)


def nonmetricity(g: MetricField, Kf: TensorField, x) -> np.ndarray:
    gj = _metric_jet(g, x)
    return nonmetricity_from(gj.value, gj.grad, Kf.at(x))


def contorsion(g: MetricField, Kf: TensorField, x) -> np.ndarray:
    gj = _metric_jet(g, x)
    return contorsion_from(gj.value, gj.grad, Kf.at(x))


@dataclass(frozen=True)
class Decomposition:
    christoffel: np.ndarray
    contorsion: np.ndarray
    nonmetricity: np.ndarray
    reconstruction_defect: float


def decompose_reconstruct(g: MetricField, Kf: TensorField, x) -> Decomposition:
    """Split K_{mu nu alpha} = {_mu nu alpha} + S_{mu nu alpha} + 1/2 C_{mu nu alpha} and report the defect."""
    gj = _metric_jet(g, x)
    K = Kf.at(x)
    chris = christoffel_lower_from(gj.grad)
    S = contorsion_from(gj.value, gj.grad, K)
    C = nonmetricity_from(gj.value, gj.grad, K)
    defect = float(np.max(np.abs(lower(gj.value, K) - (chris + S + 0.5 * C))))
    return Decomposition(chris, S, C, defect)


def metric_connection(g: MetricField, Tf: TensorField | np.ndarray, x) -> np.ndarray:
    """Metric connection with prescribed torsion T_mu^nu_lam at ``x``."""
    gj = _metric_jet(g, x)
    T = Tf.at(x) if isinstance(Tf, TensorField) else np.asarray(Tf, dtype=float)
    if T.shape != (g.n,) * 3:
        raise ValueError(f"torsion must have shape {(g.n,) * 3}")
    scale = max(1.0, float(np.max(np.abs(T))))
    if np.max(np.abs(T + T.transpose(2, 1, 0))) > ANTISYMMETRY_TOL * scale:
        raise ValueError("torsion is not antisymmetric in its outer indices")
    return metric_connection_from(gj, T).value


def tetrad_coefficients_from(coframe, frame, dframe, Kg):
    """A_lam^b_a = -h^b_mu d_lam h^mu_a + K_lam^mu_nu h^b_mu h^nu_a.

    ``coframe[b, mu]`` = h^b_mu, ``frame[a, mu]`` = h^mu_a,
    ``dframe[a, mu, lam]`` = d_lam h^mu_a.
    """
    return -np.einsum("bm,aml->lba", coframe, dframe) + np.einsum("lmn,bm,an->lba", Kg, coframe, frame)


def tetrad_coefficients(g: MetricField, Kg: TensorField, x, tetrad: TetradField | None = None) -> np.ndarray:
    tetrad = tetrad or TetradField(g)
    co = tetrad.coframe_jet(x)
    if abs(np.linalg.det(co.value)) < 1e-12:
        raise ValueError("singular tetrad")
    fr = J.inv(co.truncate()).transpose(1, 0)
    return tetrad_coefficients_from(co.value, fr.value, fr.grad, Kg.at(x))


def lowered_antisymmetry_defect(A: np.ndarray, eta) -> float:
    """max |A_{lam b a} + A_{lam a b}| with A_{lam b a} = eta_{bc} A_lam^c_a."""
    A_low = np.asarray(eta, dtype=float)[None, :, None] * A
    return float(np.max(np.abs(A_low + A_low.transpose(0, 2, 1))))


def jet_splitting(k: np.ndarray, kj: np.ndarray):
    return jet_splitting_from(np.asarray(k, dtype=float), np.asarray(kj, dtype=float))


def ricci(R):
    """Ricci-like contraction R_{alpha beta} = R_{lam alpha}^lam_beta."""
    return einsum("lalb->ab", R)


def scalar_curvature(g, R):
    """sigma^{mu beta} R_{lam mu}^lam_beta."""
    return einsum("ab,ab->", J.inv(g), ricci(R))
