import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from twistorprod.bivector import (
    S_BASIS, Bivector, act_on_bivector, cross, cross6, curvature_endo, embed, from_wedge_basis,
    gamma_metric, hodge_star, inner, k_endo, k_minus, k_plus, metric_lambda2, metric_lambda2_det,
    point_geometry, sd_split, to_matrix, to_wedge_basis, wedge,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)
vec4 = arrays(np.float64, 4, elements=finite)
vec6 = arrays(np.float64, 6, elements=finite)


def test_s_basis_is_orthonormal():
    gram = np.einsum("iab,jab->ij", S_BASIS, S_BASIS) / 4
    assert np.allclose(gram, np.eye(6))


@given(vec4, vec4, vec4, vec4)
def test_induced_metric_is_half_determinant(v1, v2, v3, v4):
    lhs = inner(wedge(v1, v2), wedge(v3, v4))
    assert lhs == pytest.approx(metric_lambda2_det(v1, v2, v3, v4), abs=1e-9)


@given(vec6)
def test_wedge_basis_round_trip(a):
    assert np.allclose(from_wedge_basis(to_wedge_basis(a)), a)


def test_hodge_star_on_wedges():
    E = np.eye(4)
    # *(E1^E2) = E3^E4 for the standard orientation
    assert np.allclose(hodge_star(wedge(E[0], E[1])), wedge(E[2], E[3]))
    assert np.allclose(hodge_star(wedge(E[0], E[2])), wedge(E[3], E[1]))


@given(vec6)
def test_self_dual_split(a):
    plus, minus = sd_split(a)
    assert np.allclose(plus + minus, a)
    assert np.allclose(hodge_star(plus), plus)
    assert np.allclose(hodge_star(minus), -minus)


@given(vec6, vec4, vec4)
def test_k_defining_identity(a, X, Y):
    # g(K_a X, Y) = 2 g(a, X^Y)
    assert (k_endo(a) @ X) @ Y == pytest.approx(2 * inner(a, wedge(X, Y)), abs=1e-8)


@given(vec6, vec6)
def test_gamma_metric(a, b):
    assert gamma_metric(k_endo(a), k_endo(b)) == pytest.approx(2 * inner(a, b), abs=1e-8)


@given(vec3, vec3)
def test_commuting_halves(b, c):
    assert np.allclose(k_plus(b) @ k_minus(c), k_minus(c) @ k_plus(b))


@given(vec3, vec3)
def test_anticommuting_orthogonal(b, c):
    c = c - (c @ b) / max(b @ b, 1e-12) * b
    for K in (k_plus, k_minus):
        assert np.allclose(K(b) @ K(c), -K(c) @ K(b), atol=1e-8)


@given(vec3, vec3)
def test_kk_products(b, c):
    lhs_p = k_plus(b) @ k_plus(c)
    assert np.allclose(lhs_p, -(b @ c) * np.eye(4) + k_plus(cross(b, c)), atol=1e-9)
    lhs_m = k_minus(b) @ k_minus(c)
    assert np.allclose(lhs_m, -(b @ c) * np.eye(4) - k_minus(cross(b, c)), atol=1e-9)


def test_unit_sigma_gives_complex_structure():
    s = np.array([1.0, 2.0, 2.0]) / 3
    for K in (k_plus, k_minus):
        J = K(s)
        assert np.allclose(J @ J, -np.eye(4))
        assert np.allclose(J.T, -J)
    # compatible with +- the orientation: Pfaffian sign
    assert np.linalg.det(k_plus(s)) == pytest.approx(1.0)


def test_cross6_rejects_mixed_halves():
    with pytest.raises(ValueError):
        cross6(embed(plus=[1, 0, 0]), embed(minus=[0, 1, 0]))
    assert np.allclose(cross6(embed(plus=[1, 0, 0]), embed(plus=[0, 1, 0])), embed(plus=[0, 0, 1]))


def test_bivector_metric_requires_same_point():
    a = Bivector((0, 0, 0, 0), np.ones(6))
    b = Bivector((0, 0, 0, 0.1), np.ones(6))
    assert metric_lambda2(a, a) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        metric_lambda2(a, b)


@settings(max_examples=30, deadline=None)
@given(vec6, vec3, vec3, st.sampled_from([0, 1, 2, 3, 4]))
def test_curvature_action_on_halves(a, b, c, which):
    # g(R(a) b, c) = +- g(Rop a, b x c) inside each half
    from twistorprod.catalog import default_catalog

    entry = default_catalog()[which]
    Rop = point_geometry(entry.chart, entry.sample_points(1, seed=which)[0]).Rop
    L = curvature_endo(Rop, a)
    lhs_p = inner(act_on_bivector(L, embed(plus=b)), embed(plus=c))
    lhs_m = inner(act_on_bivector(L, embed(minus=b)), embed(minus=c))
    scale = 1 + np.abs(Rop).max() * (1 + np.abs(a).max()) * (1 + np.abs(b).max()) * (1 + np.abs(c).max())
    assert lhs_p == pytest.approx(inner(Rop @ a, embed(plus=cross(b, c))), abs=1e-10 * scale)
    assert lhs_m == pytest.approx(-inner(Rop @ a, embed(minus=cross(b, c))), abs=1e-10 * scale)


def test_decomposition_blocks(verified_catalog):
    for entry in verified_catalog:
        geo = point_geometry(entry.chart, entry.sample_points(1, seed=9)[0])
        dec = geo.decomposition
        assert dec.reconstruction_residual() < 1e-10
        assert abs(np.trace(dec.W_plus)) < 1e-9 and abs(np.trace(dec.W_minus)) < 1e-9
        # B maps each half to the other one
        assert np.abs(dec.B[:3, :3]).max() < 1e-9 and np.abs(dec.B[3:, 3:]).max() < 1e-9
        assert np.allclose(dec.R, dec.R.T)


def test_constant_curvature_eigenvalue(sphere):
    # for sectional curvature chi the operator is 2 chi on both halves
    geo = point_geometry(sphere.chart, sphere.sample_points(1, seed=1)[0])
    assert np.allclose(geo.Rop, 2.0 * np.eye(6), atol=1e-9)
    assert np.allclose(geo.Rop, geo.scalar / 6 * np.eye(6), atol=1e-9)


def test_to_matrix_is_k_up_to_sign():
    a = np.arange(6.0)
    assert np.allclose(to_matrix(a), -k_endo(a))
