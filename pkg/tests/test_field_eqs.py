import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from maggeo import field_eqs as F
from maggeo import geometry as G
from maggeo import jets as J
from maggeo.clifford import Signature
from maggeo.fields import (
    PolynomialVectorField,
    connection_field,
    levi_civita_field,
    metric_connection_field,
    metric_field,
    random_connection,
    random_metric,
    random_torsion,
)
from maggeo.jets import Jet
from maggeo.presets import get_preset

import oracles as O

seeds = st.integers(0, 2**32 - 1)
sigs = st.sampled_from([Signature(2, 0), Signature(1, 1), Signature(3, 0), Signature(1, 2), Signature(1, 3)])


def _lc(metric):
    return F.FieldConfiguration(metric, levi_civita_field(metric))


def _random_config(sig, rng, kind="general"):
    metric = random_metric(sig, rng)
    if kind == "general":
        conn = random_connection(sig.n, rng)
    elif kind == "metric":
        conn = metric_connection_field(metric, random_torsion(sig.n, rng))
    else:
        conn = levi_civita_field(metric)
    return F.FieldConfiguration(metric, conn)


def _projective_shift(metric, xi):
    """Levi-Civita connection plus delta^alpha_beta xi_mu."""
    n = metric.n
    shift = np.einsum("m,ab->mab", np.asarray(xi, dtype=float), np.eye(n))

    def fn(x):
        return G.levi_civita(metric.jet(x)) + Jet.constant(shift, n, order=1)

    return F.FieldConfiguration(metric, connection_field(n, fn, "projective"))


def test_configuration_dimension_mismatch():
    with pytest.raises(ValueError, match="dimensions"):
        F.FieldConfiguration(get_preset("sphere").metric(), random_connection(3, np.random.default_rng(0)))


@pytest.mark.parametrize("theta", [0.5, 1.2, 2.0])
def test_sphere_lagrangian_by_hand(theta):
    cfg = _lc(get_preset("sphere").metric())
    assert math.isclose(F.lagrangian_density(cfg, [theta, 0.3]), -2 * math.sin(theta), abs_tol=1e-13)
    assert F.lagrangian_scale(cfg, [theta, 0.3]) >= abs(F.lagrangian_density(cfg, [theta, 0.3]))


def test_schwarzschild_levi_civita_solves_both_equations():
    cfg = _lc(get_preset("schwarzschild").metric())
    rng = np.random.default_rng(0)
    for x in get_preset("schwarzschild").sample(Signature(1, 3), {}, 10, rng):
        E = F.el_metric_residual(cfg, x)
        assert np.max(np.abs(E)) < 1e-8
        assert np.allclose(E, O.mapped_einstein("schwarzschild", x, M=1.0), atol=1e-8)
        assert np.max(np.abs(F.el_connection_residual(cfg, x))) < 1e-9


@pytest.mark.parametrize("H", [0.5, 1.0, 2.0])
def test_de_sitter_metric_residual_is_cosmological(H):
    metric = get_preset("de_sitter").metric(params={"H": H})
    cfg = _lc(metric)
    rng = np.random.default_rng(1)
    for x in get_preset("de_sitter").sample(Signature(1, 3), {"H": H}, 5, rng):
        E = F.el_metric_residual(cfg, x)
        assert np.allclose(E, O.mapped_einstein("de_sitter", x, H=H), atol=1e-9)
        assert np.allclose(E, -3 * H**2 * metric.at(x), atol=1e-9)
        assert get_preset("de_sitter").expected_einstein({"H": H}) == -3 * H**2


@given(sigs, seeds)
def test_metric_residual_is_the_inverse_metric_derivative(sig, seed):
    rng = np.random.default_rng(seed)
    cfg = _random_config(sig, rng)
    x = rng.uniform(-1, 1, sig.n)
    p = F._point(cfg, x)
    g, k, kj = p.g.value, p.k.value, p.kj
    E = F.el_metric_residual(cfg, x)
    root = math.sqrt(abs(np.linalg.det(g)))
    delta = rng.normal(size=(sig.n, sig.n))
    delta = delta + delta.T
    h = 1e-6

    def L(up):
        return F.lagrangian_from(np.linalg.inv(up), k, kj)

    up = np.linalg.inv(g)
    fd = (L(up + h * delta) - L(up - h * delta)) / (2 * h)
    # dL / d sigma^{alpha beta} is the symmetrized, densitized metric residual
    sym = 0.5 * (E + E.T)
    assert abs(fd - root * np.sum(sym * delta)) < 1e-6 * max(1.0, abs(fd))


def _oracle_connection_check(coords, g_sym, fn, point, rng):
    n = len(coords)
    at = O.connection_euler_lagrange(coords, g_sym, point)
    metric = metric_field(Signature(*_signature_counts(g_sym, coords, point)), fn)
    gj = metric.jet(point)
    k = rng.normal(size=(n, n, n))
    mine = F.connection_residual_from(gj, k)
    ref = at(k)
    assert np.allclose(mine, ref, atol=1e-10 * max(1.0, np.max(np.abs(ref))))


def _signature_counts(g_sym, coords, point):
    vals = np.linalg.eigvalsh(np.array(g_sym.subs(dict(zip(coords, point))), dtype=float))
    return int(np.sum(vals > 0)), int(np.sum(vals < 0))


def test_connection_residual_matches_symbolic_euler_lagrange_2d():
    a, b = sp.symbols("a b", real=True)
    g_sym = sp.Matrix([[1 + a**2, a * b / 3], [a * b / 3, 2 + sp.sin(b)]])

    def fn(v):
        return [[1 + v[0] ** 2, v[0] * v[1] / 3], [v[0] * v[1] / 3, 2 + J.sin(v[1])]]

    _oracle_connection_check([a, b], g_sym, fn, [0.4, -0.7], np.random.default_rng(0))


def test_connection_residual_matches_symbolic_euler_lagrange_3d_lorentzian():
    a, b, c = sp.symbols("a b c", real=True)
    g_sym = sp.Matrix([[1 + a * c / 4, b / 5, 0], [b / 5, -1 - a**2 / 3, c / 7], [0, c / 7, -2 + sp.cos(a) / 2]])

    def fn(v):
        return [
            [1 + v[0] * v[2] / 4, v[1] / 5, 0.0],
            [v[1] / 5, -1 - v[0] ** 2 / 3, v[2] / 7],
            [0.0, v[2] / 7, -2 + J.cos(v[0]) / 2],
        ]

    _oracle_connection_check([a, b, c], g_sym, fn, [0.3, 0.5, -0.2], np.random.default_rng(1))


@given(sigs, seeds)
def test_levi_civita_solves_connection_equation(sig, seed):
    rng = np.random.default_rng(seed)
    cfg = _random_config(sig, rng, "levi_civita")
    x = rng.uniform(-1, 1, sig.n)
    assert np.max(np.abs(F.el_connection_residual(cfg, x))) < 1e-9
    rep = F.onshell_reduction_check(cfg, x)
    assert rep.passed
    assert all(v < 1e-8 for v in rep.defects.values())


@given(sigs, seeds, st.sampled_from(["general", "metric", "levi_civita"]))
def test_reduced_identity_holds_off_shell(sig, seed, kind):
    rng = np.random.default_rng(seed)
    cfg = _random_config(sig, rng, kind)
    x = rng.uniform(-1, 1, sig.n)
    lhs, rhs = F.reduced_identity_sides(cfg, x)
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * max(1.0, np.max(np.abs(lhs)))


def test_onshell_check_refuses_off_shell_configurations():
    cfg = _random_config(Signature(1, 3), np.random.default_rng(3))
    with pytest.raises(F.OnShellPreconditionError, match="not on shell") as err:
        F.onshell_reduction_check(cfg, np.zeros(4))
    assert err.value.residual > 1e-3


@pytest.mark.parametrize("sig", [Signature(2, 0), Signature(1, 3)])
def test_projective_shift_solves_connection_equation_but_is_not_levi_civita(sig):
    """The connection equation has the projective family as solutions; on-shell does not force c = t = 0."""
    rng = np.random.default_rng(7)
    metric = random_metric(sig, rng)
    xi = rng.normal(size=sig.n)
    cfg = _projective_shift(metric, xi)
    x = rng.uniform(-0.5, 0.5, sig.n)
    assert np.max(np.abs(F.el_connection_residual(cfg, x))) < 1e-12
    rep = F.onshell_reduction_check(cfg, x)
    assert not rep.passed
    red = F.reduction_variables(cfg, x)
    g = metric.at(x)
    # c_{mu nu alpha} = 2 xi_mu sigma_{nu alpha} and the contorsion still vanishes
    assert np.allclose(red.c, 2 * np.einsum("m,na->mna", xi, g), atol=1e-12)
    assert np.max(np.abs(red.s)) < 1e-12
    expected_t = np.einsum("m,na->mna", xi, g) - np.einsum("a,nm->mna", xi, g)
    assert np.allclose(red.t, expected_t, atol=1e-12)
    assert np.max(np.abs(red.t)) > 1e-3
    assert F.reduced_identity_defect(cfg, x) < 1e-12
    # the curvature scalar, hence the Lagrangian, is unchanged by the shift
    assert math.isclose(F.lagrangian_density(cfg, x), F.lagrangian_density(_lc(metric), x), abs_tol=1e-12)


def test_report_flags_projective_shift():
    metric = random_metric(Signature(1, 3), np.random.default_rng(8))
    cfg = _projective_shift(metric, [0.3, 0.0, -0.2, 0.1])
    report = F.residual_report(cfg, np.zeros(4))
    assert "onshell_torsion" in report.violations()
    assert "onshell_nonmetricity" in report.violations()
    assert "onshell_contorsion" not in report.violations()


@given(seeds)
def test_covariance_first_order_defect_on_sphere(seed):
    rng = np.random.default_rng(seed)
    cfg = _lc(get_preset("sphere").metric())
    tau = PolynomialVectorField.random(2, rng, scale=0.5)
    x = np.array([rng.uniform(0.5, 2.5), rng.uniform(0, 6)])
    assert F.first_order_covariance_defect(cfg, tau, x) < 1e-8


@given(sigs, seeds)
def test_covariance_first_order_defect_random_configuration(sig, seed):
    rng = np.random.default_rng(seed)
    cfg = _random_config(sig, rng)
    tau = PolynomialVectorField.random(sig.n, rng, scale=0.5)
    x = rng.uniform(-0.5, 0.5, sig.n)
    scale = max(1.0, F.lagrangian_scale(cfg, x))
    assert F.first_order_covariance_defect(cfg, tau, x) < 1e-8 * scale


def test_zero_vector_field_transforms_nothing():
    rng = np.random.default_rng(2)
    cfg = _random_config(Signature(1, 2), rng)
    x = np.array([0.1, 0.2, -0.3])
    assert F.transformation_defect(cfg, PolynomialVectorField.zero(3), x, 0.1) == 0.0
    with pytest.raises(ValueError, match="positive"):
        F.covariance_invariance_defect(cfg, PolynomialVectorField.zero(3), x, 0.0)


@given(sigs, seeds, st.sampled_from([0.3, 0.1, 1e-2]))
def test_finite_transformations_leave_the_density_invariant(sig, seed, eps):
    rng = np.random.default_rng(seed)
    cfg = _random_config(sig, rng)
    tau = PolynomialVectorField.random(sig.n, rng, scale=0.5)
    x = rng.uniform(-0.5, 0.5, sig.n)
    jac = np.eye(sig.n) + eps * tau.jacobian_jet(x).value
    if np.linalg.cond(jac) > 1e3:
        return
    scale = max(1.0, F.lagrangian_scale(cfg, x)) * np.linalg.cond(jac) ** 2
    assert abs(F.transformation_defect(cfg, tau, x, eps)) < 1e-12 * scale


@given(sigs, seeds)
def test_covariant_lift_is_the_derivative_of_the_finite_transformation(sig, seed):
    rng = np.random.default_rng(seed)
    cfg = _random_config(sig, rng)
    tau = PolynomialVectorField.random(sig.n, rng, scale=0.5)
    x = rng.uniform(-0.5, 0.5, sig.n)
    lift = F.covariant_lift(tau, cfg, x)
    eps = 1e-6
    tr = F.transform_configuration(cfg, tau, x, eps)
    p = F._point(cfg, x)
    # transformed fields at x' compared with the originals at x: the total variation
    d_sigma = (tr.sigma_up - p.sigma_up) / eps
    d_k = (tr.k - p.k.value) / eps
    assert np.allclose(d_sigma, lift.metric, atol=1e-4 * max(1.0, np.max(np.abs(lift.metric))))
    assert np.allclose(d_k, lift.connection, atol=1e-4 * max(1.0, np.max(np.abs(lift.connection))))
    assert np.array_equal(lift.base, tau.value(x))


@given(sigs, seeds)
def test_utiyama_curvature_preserving_perturbations(sig, seed):
    rng = np.random.default_rng(seed)
    cfg = _random_config(sig, rng)
    x = rng.uniform(-1, 1, sig.n)
    assert F.utiyama_factorization_check(cfg, x, seed=seed % 1000) < 1e-12
    assert F.utiyama_factorization_check(cfg, x, seed=seed % 1000, symmetric=False) > 1e-6


def test_residual_report_serializes():
    cfg = _lc(get_preset("sphere").metric())
    report = F.residual_report(cfg, [1.0, 0.5], expected_einstein=0.0)
    d = report.to_dict()
    assert set(d) == {"point", "values", "defects", "tolerances"}
    assert report.passed
    assert set(d["values"]) == {"E_metric", "E_conn", "c", "t", "s"}
    # in two dimensions the Einstein-like residual vanishes identically
    assert d["defects"]["metric_residual"] < 1e-12
