import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from maggeo import clifford as C
from maggeo import spin as S
from maggeo.clifford import Signature
from maggeo.fields import TetradField, levi_civita_field, random_metric, random_torsion, metric_connection_field
from maggeo.presets import get_preset

EVEN = [Signature(2, 0), Signature(1, 1), Signature(0, 2), Signature(4, 0), Signature(1, 3), Signature(2, 2), Signature(3, 1), Signature(0, 4)]


@pytest.mark.parametrize("sig", EVEN)
def test_gamma_matrices_satisfy_clifford_relation(sig):
    rep = S.gamma_matrices(sig)
    assert rep.dim == 2 ** (sig.n // 2)
    assert rep.clifford_defect() == 0.0
    for s, g in zip(sig.eta, rep.gammas):
        # positive-square generators are Hermitian, negative ones anti-Hermitian
        assert np.array_equal(g.conj().T, s * g)


def test_gamma_matrices_reject_odd_dimension():
    with pytest.raises(ValueError, match="even"):
        S.gamma_matrices(Signature(2, 1))


@pytest.mark.parametrize("sig", EVEN)
def test_gamma_representation_is_irreducible(sig):
    rep = S.gamma_matrices(sig)
    assert S.commutant_dimension(rep) == 1
    # a doubled representation has a 4-dimensional commutant
    assert S.commutant_dimension(S.direct_sum(rep)) == 4


@pytest.mark.parametrize("sig", [Signature(2, 0), Signature(1, 1), Signature(1, 3), Signature(2, 2), Signature(0, 4)])
def test_left_ideal_representation_is_equivalent_to_gammas(sig):
    ideal = S.left_ideal_gammas(sig)
    assert S.clifford_defect(ideal, sig.metric()) < 1e-12
    dim, basis = S.intertwiner_space(ideal, S.gamma_matrices(sig).gammas)
    assert dim == 1
    phi = basis[0]
    assert abs(np.linalg.det(phi)) > 1e-8
    for a, b in zip(ideal, S.gamma_matrices(sig).gammas):
        assert np.allclose(phi @ a, b @ phi, atol=1e-10)


def test_intertwiner_space_validates_shapes():
    with pytest.raises(ValueError):
        S.intertwiner_space([np.eye(2)], [np.eye(2), np.eye(2)])
    with pytest.raises(ValueError):
        S.intertwiner_space([np.eye(2)], [np.eye(3)])


def test_metric_gammas_are_not_equivalent_for_different_metrics():
    sig = Signature(1, 3)
    rep = S.gamma_matrices(sig)
    g1 = np.diag([1.0, -1.0, -1.0, -1.0])
    g2 = np.diag([1.0, -4.0, -1.0, -1.0])
    a = S.covector_gammas(rep, S.tetrad_from_metric(g1))
    b = S.covector_gammas(rep, S.tetrad_from_metric(g2))
    assert S.clifford_defect(a, np.linalg.inv(g1)) < 1e-12
    assert S.clifford_defect(b, np.linalg.inv(g2)) < 1e-12
    assert S.intertwiner_space(a, b)[0] == 0
    assert S.intertwiner_space(a, a)[0] == 1


@given(st.integers(0, 2**32 - 1))
def test_covector_gammas_of_random_metric_satisfy_inverse_metric_relation(seed):
    rng = np.random.default_rng(seed)
    sig = Signature(1, 3)
    h = np.eye(4) + 0.3 * rng.normal(size=(4, 4))
    g = h.T @ sig.metric() @ h
    tetrad = S.tetrad_from_metric(g, sig)
    assert np.allclose(tetrad.metric(), g, atol=1e-12)
    assert tetrad.completeness_defect() < 1e-12
    gam = S.covector_gammas(S.gamma_matrices(sig), tetrad)
    assert S.clifford_defect(gam, np.linalg.inv(g)) < 1e-10 * max(1.0, np.max(np.abs(np.linalg.inv(g))))


def test_tetrad_rejects_wrong_signature_and_degenerate_metric():
    with pytest.raises(ValueError, match="signature"):
        S.tetrad_from_metric(np.eye(4), Signature(1, 3))
    with pytest.raises(ValueError, match="degenerate"):
        S.tetrad_from_metric(np.diag([1.0, 0.0]))
    with pytest.raises(ValueError, match="symmetric"):
        S.tetrad_from_metric(np.array([[1.0, 1.0], [0.0, 1.0]]))


@pytest.mark.parametrize("sig", [Signature(2, 0), Signature(1, 1), Signature(1, 3), Signature(2, 2)])
def test_spin_generators_implement_vector_generators(sig):
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    L = S.vector_generators(sig)
    for b in range(sig.n):
        for a in range(sig.n):
            for c in range(sig.n):
                comm = gens.I[b, a] @ rep.gammas[c] - rep.gammas[c] @ gens.I[b, a]
                # [I_b^a, gamma^c] = -(L_b^a)^c_d gamma^d
                expected = -sum(L[b, a, c, d] * rep.gammas[d] for d in range(sig.n))
                assert np.allclose(comm, expected, atol=1e-14)
    low = gens.lowered()
    assert np.allclose(low, -low.transpose(1, 0, 2, 3), atol=1e-15)


@given(st.integers(0, 2**32 - 1))
def test_spinor_image_exponentiates_to_double_cover(seed):
    rng = np.random.default_rng(seed)
    sig = Signature(1, 3)
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    L = S.vector_generators(sig)
    coeffs = rng.normal(size=(4, 4)) * 0.5
    X = sum(coeffs[b, a] * L[b, a] for b in range(4) for a in range(b + 1, 4))
    U = expm(S.spinor_image(X, gens))
    Lam = expm(X)
    Uinv = np.linalg.inv(U)
    for c in range(4):
        lhs = U @ rep.gammas[c] @ Uinv
        rhs = sum(Lam[c, d] * rep.gammas[d] for d in range(4))
        assert np.allclose(lhs, rhs, atol=1e-9 * max(1.0, np.max(np.abs(Lam))))


def test_spinor_image_rejects_non_orthogonal_generator():
    gens = S.spin_generators(S.gamma_matrices(Signature(2, 0)))
    with pytest.raises(ValueError, match="so"):
        S.spinor_image(np.eye(2), gens)


@pytest.mark.parametrize("plane", [(1, 2), (2, 3), (1, 3)])
def test_full_rotation_is_minus_identity_on_spinors_in_lorentzian_signature(plane):
    sig = Signature(1, 3)
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    b, a = plane
    L = S.vector_generators(sig)[b, a]
    assert np.allclose(expm(2 * math.pi * L), np.eye(4), atol=1e-12)
    U = expm(2 * math.pi * S.spinor_image(L, gens))
    assert np.allclose(U, -np.eye(rep.dim), atol=1e-12)


@given(st.sampled_from([Signature(2, 0), Signature(1, 1), Signature(0, 3), Signature(1, 3)]), st.integers(0, 2**32 - 1))
def test_random_spin_elements_cover_orthogonal_group(sig, seed):
    g = C.random_spin_element(sig, seed)
    assert g.is_spin
    z = C.zeta_matrix(g)
    assert C.eta_orthogonality_defect(z, sig) < 1e-12
    assert np.array_equal(C.zeta_matrix(-g), z)


def _sphere_setup():
    sphere = get_preset("sphere").metric()
    return sphere, levi_civita_field(sphere)


@pytest.mark.parametrize("theta", [0.4, 1.0, 1.3, 2.5])
def test_sphere_spin_connection_matches_hand_result(theta):
    sphere, lc = _sphere_setup()
    rep = S.gamma_matrices(Signature(2, 0))
    gens = S.spin_generators(rep)
    point = S.spin_connection_at(rep, gens, sphere, lc, [theta, 0.7], np.random.default_rng(0))
    assert np.allclose(point.omega[0], 0.0, atol=1e-14)
    expected = -math.cos(theta) * gens.I[0, 1]
    assert np.allclose(point.omega[1], expected, atol=1e-12)
    assert point.antisymmetry_defect < 1e-14
    assert point.restriction_defect < 1e-12
    assert point.compatibility_defect < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_spin_connection_of_random_metric_connection(seed):
    rng = np.random.default_rng(seed)
    sig = Signature(1, 3)
    metric = random_metric(sig, rng, scale=0.05)
    conn = metric_connection_field(metric, random_torsion(4, rng, 0.5))
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    point = S.spin_connection_at(rep, gens, metric, conn, rng.uniform(-1, 1, 4), rng)
    assert point.antisymmetry_defect < 1e-10
    assert point.restriction_defect < 1e-10
    assert point.compatibility_defect < 1e-10


def test_spin_connection_shape_validation():
    rep = S.gamma_matrices(Signature(2, 0))
    gens = S.spin_generators(rep)
    with pytest.raises(ValueError, match="shape"):
        S.spin_connection_matrix(rep, gens, np.zeros((2, 3, 3)))


def _literal_vertical_differential(gens, coframe, coframe_jets, Kg, y, y_jets):
    """Variant with sigma^b_{lam mu} sigma^mu_a (coframe jets times frame) in place of the frame-jet term."""
    frame = np.linalg.inv(coframe)
    jet_term = np.einsum("bml,ma->lba", coframe_jets, frame)
    conn_term = np.einsum("lmn,bm,na->lba", Kg, coframe, frame)
    coeff = 0.5 * (jet_term - conn_term)
    return y_jets + np.einsum("lba,baij,j->li", coeff, gens.I, y)


def test_coframe_jet_variant_of_vertical_differential_is_not_the_restriction():
    sig = Signature(1, 3)
    rng = np.random.default_rng(3)
    metric = random_metric(sig, rng, scale=0.3)
    lc = levi_civita_field(metric)
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    x = rng.uniform(-0.5, 0.5, 4)
    co = TetradField(metric).coframe_jet(x)
    y = rng.normal(size=4) + 1j * rng.normal(size=4)
    dy = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    point = S.spin_connection_at(rep, gens, metric, lc, x, rng)
    direct = dy + np.einsum("lij,j->li", point.omega, y)
    good = S.vertical_covariant_differential(rep, gens, co.value, co.grad, lc.at(x), y, dy)
    bad = _literal_vertical_differential(gens, co.value, co.grad, lc.at(x), y, dy)
    assert np.max(np.abs(good - direct)) < 1e-12
    assert np.max(np.abs(bad - direct)) > 0.1


def test_coframe_jet_variant_coefficient_is_not_antisymmetric_on_sphere():
    sphere, lc = _sphere_setup()
    x = np.array([1.0, 0.3])
    co = TetradField(sphere).coframe_jet(x)
    frame = np.linalg.inv(co.value)
    frame_jets = -np.einsum("mc,cnl,na->mal", frame, co.grad, frame)
    K = lc.at(x)
    literal = np.einsum("bml,ma->lba", co.grad, frame) - np.einsum("lmn,bm,na->lba", K, co.value, frame)
    fixed = np.einsum("bm,mal->lba", co.value, frame_jets) - np.einsum("lmn,bm,na->lba", K, co.value, frame)
    assert np.max(np.abs(fixed + fixed.transpose(0, 2, 1))) < 1e-14
    assert abs(literal[0, 1, 1] - 2 / math.tan(1.0)) < 1e-12


def test_vertical_differential_rejects_singular_coframe():
    rep = S.gamma_matrices(Signature(2, 0))
    gens = S.spin_generators(rep)
    with pytest.raises(ValueError, match="singular"):
        S.vertical_covariant_differential(rep, gens, np.zeros((2, 2)), np.zeros((2, 2, 2)), np.zeros((2, 2, 2)), np.zeros(2), np.zeros((2, 2)))
