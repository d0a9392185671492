"""Metric-affine Hilbert-Einstein Lagrangian and its Euler-Lagrange residuals.

The configuration is a metric sigma (the field returns the lowered
components sigma_{mu nu}; sigma^{mu nu} is its inverse) and a general linear
connection k.  All total derivatives are realized by jet composition of the
fields, so on sections they are exact.  sqrt(sigma) is sqrt|det sigma_{mu nu}|.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets as J
from .fields import MetricField, PolynomialVectorField, TensorField
from .geometry import (
    christoffel_lower_from,
    contorsion_from,
    jet_splitting_from,
    jets_of,
    lower,
    nonmetricity_from,
    ricci,
    torsion_from,
)
from .jets import Jet

ONSHELL_FACTOR = 10.0
DEFAULT_EPSILONS = (1e-3, 1e-4)


@dataclass(frozen=True)
class FieldConfiguration:
    metric: MetricField
    connection: TensorField

    def __post_init__(self):
        if self.metric.n != self.connection.n:
            raise ValueError("metric and connection live on different dimensions")

    @property
    def n(self) -> int:
        return self.metric.n


@dataclass(frozen=True)
class _Point:
    g: Jet  # sigma_{mu nu}, order 2
    k: Jet  # k_lam^mu_nu, order >= 1

    @property
    def sigma_up(self) -> np.ndarray:
        return np.linalg.inv(self.g.value)

    @property
    def kj(self) -> np.ndarray:
        return jets_of(self.k)


def _point(cfg: FieldConfiguration, x) -> _Point:
    return _Point(cfg.metric.jet(x), cfg.connection.jet(x))


def lagrangian_from(g: np.ndarray, k: np.ndarray, kj: np.ndarray) -> float:
    """sigma^{mu beta} R_{lam mu}^lam_beta sqrt|det sigma| with R the curvature part of the jets."""
    R, _ = jet_splitting_from(k, kj)
    return float(np.einsum("mb,lmlb->", np.linalg.inv(g), R) * np.sqrt(abs(np.linalg.det(g))))


def lagrangian_scale(cfg: FieldConfiguration, x) -> float:
    """sqrt(sigma) sum |sigma^{mu beta} R_{lam mu}^lam_beta|: the size of the terms summed into L."""
    p = _point(cfg, x)
    R, _ = jet_splitting_from(p.k.value, p.kj)
    terms = np.einsum("mb,lmlb->lmb", p.sigma_up, R)
    return float(np.sum(np.abs(terms)) * np.sqrt(abs(np.linalg.det(p.g.value))))


def lagrangian_density(cfg: FieldConfiguration, x) -> float:
    p = _point(cfg, x)
    return lagrangian_from(p.g.value, p.k.value, p.kj)


def el_metric_residual(cfg: FieldConfiguration, x) -> np.ndarray:
    """E_{alpha beta} = R_{alpha beta} - 1/2 sigma_{alpha beta} R, full (unsymmetrized) array."""
    p = _point(cfg, x)
    R, _ = jet_splitting_from(p.k.value, p.kj)
    ric = ricci(R)
    scal = np.einsum("ab,ab->", p.sigma_up, ric)
    return ric - 0.5 * p.g.value * scal


def _densitized_inverse(g: Jet) -> Jet:
    """sigma^{mu nu} sqrt(sigma) as a jet."""
    d = J.det(g)
    return J.inv(g) * J.sqrt(d * float(np.sign(d.value)))


def el_connection_residual(cfg: FieldConfiguration, x) -> np.ndarray:
    """E^nu_alpha^beta, array [nu, alpha, beta]."""
    p = _point(cfg, x)
    return connection_residual_from(p.g, p.k.value)


def connection_residual_from(g: Jet, k: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    su = np.linalg.inv(g.value)
    root = np.sqrt(abs(np.linalg.det(g.value)))
    dW = _densitized_inverse(g).grad  # [nu, beta, alpha] = d_alpha (sigma^{nu beta} sqrt sigma)
    delta = np.eye(n)
    derivative = -np.einsum("nba->nab", dW) + np.einsum("na,b->nab", delta, np.einsum("lbl->b", dW))
    algebraic = (
        np.einsum("ng,abg->nab", su, k)
        - np.einsum("na,b->nab", delta, np.einsum("lg,lbg->b", su, k))
        - np.einsum("nb,a->nab", su, np.einsum("gga->a", k))
        + np.einsum("lb,lna->nab", su, k)
    )
    return derivative + algebraic * root


@dataclass(frozen=True)
class Reduction:
    """Non-metricity c_{mu nu alpha}, torsion t_{mu nu alpha} (lowered) and contorsion s_{mu nu alpha}."""

    c: np.ndarray
    t: np.ndarray
    s: np.ndarray
    t_mixed: np.ndarray


def reduction_variables(cfg: FieldConfiguration, x) -> Reduction:
    p = _point(cfg, x)
    return _reduction(p.g.value, p.g.grad, p.k.value)


def _reduction(g, dg, k) -> Reduction:
    t_mixed = torsion_from(k)
    return Reduction(nonmetricity_from(g, dg, k), lower(g, t_mixed), contorsion_from(g, dg, k), t_mixed)


def reduced_identity_sides(cfg: FieldConfiguration, x) -> tuple[np.ndarray, np.ndarray]:
    """Both sides [alpha, eps, mu] of the rearranged connection equation."""
    p = _point(cfg, x)
    g = p.g.value
    su = np.linalg.inv(g)
    E = connection_residual_from(p.g, p.k.value)
    lhs = np.einsum("ne,bm,nab->aem", g, g, E) / np.sqrt(abs(np.linalg.det(g)))
    red = _reduction(g, p.g.grad, p.k.value)
    c, t, tm = red.c, red.t, red.t_mixed
    rhs = (
        c
        - 0.5 * np.einsum("me,a->aem", g, np.einsum("lg,alg->a", su, c))
        - np.einsum("ae,m->aem", g, np.einsum("lb,lbm->m", su, c))
        + 0.5 * np.einsum("ae,m->aem", g, np.einsum("lg,mlg->m", su, c))
        + np.einsum("mea->aem", t)
        + np.einsum("me,a->aem", g, np.einsum("agg->a", tm))
        + np.einsum("ae,m->aem", g, np.einsum("ggm->m", tm))
    )
    return lhs, rhs


def reduced_identity_defect(cfg: FieldConfiguration, x) -> float:
    lhs, rhs = reduced_identity_sides(cfg, x)
    return float(np.max(np.abs(lhs - rhs)))


class OnShellPreconditionError(ValueError):
    def __init__(self, residual: float, tol: float):
        super().__init__(
            f"configuration is not on shell: max |E_conn| = {residual:.3e} exceeds tol = {tol:.3e}; "
            "the reduction chain only applies to solutions of the connection equation"
        )
        self.residual = residual
        self.tol = tol


@dataclass(frozen=True)
class OnShellReport:
    connection_residual: float
    bound: float
    defects: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(v < self.bound for v in self.defects.values())


def onshell_reduction_check(cfg: FieldConfiguration, x, tol: float = 1e-9) -> OnShellReport:
    """Check that an on-shell configuration has vanishing non-metricity, torsion and contorsion
    and that k is the Levi-Civita connection; bounds are 10 * tol."""
    p = _point(cfg, x)
    res = float(np.max(np.abs(connection_residual_from(p.g, p.k.value))))
    if not res < tol:
        raise OnShellPreconditionError(res, tol)
    g, dg, k = p.g.value, p.g.grad, p.k.value
    red = _reduction(g, dg, k)
    lc = lower(g, k) - christoffel_lower_from(dg)
    defects = {
        "nonmetricity": float(np.max(np.abs(red.c))),
        "torsion": float(np.max(np.abs(red.t))),
        "contorsion": float(np.max(np.abs(red.s))),
        "levi_civita": float(np.max(np.abs(lc))),
    }
    return OnShellReport(res, ONSHELL_FACTOR * tol, defects)


@dataclass(frozen=True)
class CovariantLift:
    base: np.ndarray  # tau^mu
    metric: np.ndarray  # [alpha, beta]
    connection: np.ndarray  # [mu, alpha, beta]


def covariant_lift(tau: PolynomialVectorField, cfg: FieldConfiguration, x) -> CovariantLift:
    """Components of the lift of ``tau`` to metrics and connections at ``x``."""
    p = _point(cfg, x)
    jac = tau.jacobian_jet(x)
    d1, d2 = jac.value, jac.grad  # d1[a, n] = d_n tau^a, d2[a, m, b] = d_m d_b tau^a
    su, k = p.sigma_up, p.k.value
    metric = np.einsum("nb,an->ab", su, d1) + np.einsum("an,bn->ab", su, d1)
    conn = (
        np.einsum("an,mnb->mab", d1, k)
        - np.einsum("nb,man->mab", d1, k)
        - np.einsum("nm,nab->mab", d1, k)
        + np.einsum("amb->mab", d2)
    )
    return CovariantLift(tau.value(x), metric, conn)


@dataclass(frozen=True)
class Transformed:
    """Fields after x' = x + eps tau(x), evaluated at x' in primed coordinates."""

    sigma_up: np.ndarray
    k: np.ndarray
    kj: np.ndarray
    jacobian_det: float


def transform_configuration(cfg: FieldConfiguration, tau: PolynomialVectorField, x, epsilon: float) -> Transformed:
    """sigma transforms as a contravariant 2-tensor; k by the bundle-coordinate rule including
    the second-derivative term.  Derivatives in x' come from jets in x and the inverse Jacobian."""
    p = _point(cfg, x)
    n = cfg.n
    jac = tau.jacobian_jet(x)
    Jm = Jet.constant(np.eye(n), n) + epsilon * jac  # dx'^nu/dx^g
    Ji = J.inv(Jm)  # dx^b/dx'^a
    hessian = epsilon * jac.partial()  # [nu, m, b] = d_m d_b x'^nu
    k = p.k
    k_new = J.einsum("ng,ba,mgb,ml->lna", Jm, Ji, k, Ji) + J.einsum("ba,nmb,ml->lna", Ji, hessian, Ji)
    dk_new = np.einsum("lnas,sr->lnar", k_new.grad, Ji.value)
    sigma_up = Jm.value @ p.sigma_up @ Jm.value.T
    return Transformed(sigma_up, k_new.value, np.einsum("mabl->lmab", dk_new), float(abs(np.linalg.det(Jm.value))))


def transformation_defect(cfg: FieldConfiguration, tau: PolynomialVectorField, x, epsilon: float) -> float:
    """Signed density defect L'(x') |det dx'/dx| - L(x)."""
    tr = transform_configuration(cfg, tau, x, epsilon)
    new = lagrangian_from(np.linalg.inv(tr.sigma_up), tr.k, tr.kj) * tr.jacobian_det
    return new - lagrangian_density(cfg, x)


def covariance_invariance_defect(cfg: FieldConfiguration, tau: PolynomialVectorField, x, epsilon: float = 1e-4) -> float:
    """|L'(x') |det J| - L(x)| / eps^2."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return abs(transformation_defect(cfg, tau, x, epsilon)) / epsilon**2


def first_order_covariance_defect(
    cfg: FieldConfiguration, tau: PolynomialVectorField, x, epsilons: tuple[float, float] = DEFAULT_EPSILONS
) -> float:
    """|a| in D(eps) = a eps + b eps^2, eliminated from two step sizes (Richardson)."""
    e1, e2 = epsilons
    d1 = transformation_defect(cfg, tau, x, e1)
    d2 = transformation_defect(cfg, tau, x, e2)
    return abs((e2 * d1 / e1 - e1 * d2 / e2) / (e2 - e1))


def utiyama_factorization_check(
    cfg: FieldConfiguration, x, seed: int = 0, scale: float = 1.0, symmetric: bool = True
) -> float:
    """|Delta L| under a random perturbation of the connection jets.

    ``symmetric=True`` perturbs k_{lam mu}^alpha_beta symmetrically in lam <-> mu,
    which leaves the curvature part of the jets fixed.
    """
    p = _point(cfg, x)
    n = cfg.n
    rng = np.random.default_rng(seed)
    P = scale * rng.normal(size=(n,) * 4)
    P = P + P.transpose(1, 0, 2, 3) if symmetric else P - P.transpose(1, 0, 2, 3)
    g, k, kj = p.g.value, p.k.value, p.kj
    return abs(lagrangian_from(g, k, kj + P) - lagrangian_from(g, k, kj))


@dataclass
class ResidualReport:
    point: list[float]
    E_metric: np.ndarray
    E_conn: np.ndarray
    c: np.ndarray
    t: np.ndarray
    s: np.ndarray
    identity_defects: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)

    def violations(self) -> list[str]:
        return [k for k, v in self.identity_defects.items() if k in self.tolerances and not v < self.tolerances[k]]

    @property
    def passed(self) -> bool:
        return not self.violations()

    def to_dict(self) -> dict:
        return {
            "point": [float(v) for v in self.point],
            "values": {
                "E_metric": self.E_metric.tolist(),
                "E_conn": self.E_conn.tolist(),
                "c": self.c.tolist(),
                "t": self.t.tolist(),
                "s": self.s.tolist(),
            },
            "defects": {k: float(v) for k, v in self.identity_defects.items()},
            "tolerances": {k: float(v) for k, v in self.tolerances.items()},
        }


def residual_report(
    cfg: FieldConfiguration,
    x,
    tol_metric: float = 1e-8,
    tol_conn: float = 1e-9,
    tol_identity: float = 1e-9,
    expected_einstein: float = 0.0,
) -> ResidualReport:
    """Residuals at ``x``.  The metric residual is compared with ``expected_einstein * sigma_{alpha beta}``
    (zero for vacuum)."""
    p = _point(cfg, x)
    E_metric = el_metric_residual(cfg, x)
    E_conn = connection_residual_from(p.g, p.k.value)
    red = _reduction(p.g.value, p.g.grad, p.k.value)
    defects = {
        "metric_residual": float(np.max(np.abs(E_metric - expected_einstein * p.g.value))),
        "connection_residual": float(np.max(np.abs(E_conn))),
        "reduced_identity": reduced_identity_defect(cfg, x),
    }
    tolerances = {"metric_residual": tol_metric, "connection_residual": tol_conn, "reduced_identity": tol_identity}
    if defects["connection_residual"] < tol_conn:
        rep = onshell_reduction_check(cfg, x, tol_conn)
        for name, v in rep.defects.items():
            defects[f"onshell_{name}"] = v
            tolerances[f"onshell_{name}"] = rep.bound
    return ResidualReport(list(map(float, x)), E_metric, E_conn, red.c, red.t, red.s, defects, tolerances)
