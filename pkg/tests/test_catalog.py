import numpy as np
import pytest

from twistorprod.bivector import point_geometry
from twistorprod.catalog import (
    default_catalog, get_entry, make_cp2, make_perturbed_flat, make_round_sphere, make_s2xs2,
    reoriented, user_entry, verification_digest,
)
from twistorprod.chart import DegenerateMetric


def _norms(entry, seed=0):
    geo = point_geometry(entry.chart, entry.sample_points(1, seed=seed)[0])
    return geo.scalar, geo.decomposition.norms()


def test_default_catalog_verifies():
    for entry in default_catalog():
        rec = entry.verify(n_points=4, seed=2)
        assert rec["ok"], rec


def test_sphere_scalar_curvature():
    for r in (0.5, 2.0):
        s, n = _norms(make_round_sphere(r))
        assert s == pytest.approx(12 / r**2)
        assert max(n.values()) < 1e-8


def test_cp2_one_sided_weyl():
    s, n = _norms(make_cp2(1))
    assert s == pytest.approx(24.0)
    assert n["B"] < 1e-8 and n["W_minus"] < 1e-8 and n["W_plus"] > 1
    s, n = _norms(make_cp2(-1))
    assert n["W_plus"] < 1e-8 and n["W_minus"] > 1


def test_s2xs2_einstein_iff_equal_radii():
    s, n = _norms(make_s2xs2(1.0, 1.0))
    assert s == pytest.approx(4.0)
    assert n["B"] < 1e-8 and n["W_plus"] > 1e-2 and n["W_minus"] > 1e-2
    s, n = _norms(make_s2xs2(1.0, 2.0))
    assert s == pytest.approx(2.5)
    assert n["B"] > 1e-2


def test_perturbed_flat_has_all_blocks():
    _, n = _norms(make_perturbed_flat(0.1, 7))
    assert min(n.values()) > 1e-4
    flat = make_perturbed_flat(0.0, 7)
    assert flat.verify(n_points=3)["ok"]
    with pytest.raises(DegenerateMetric):
        make_perturbed_flat(-0.1)


def test_reoriented_swaps_claims():
    e = reoriented(make_cp2(1))
    assert e.chart.orientation == -1
    assert e.known.anti_self_dual and not e.known.self_dual
    assert e.verify(n_points=3)["ok"]


def test_wrong_claim_is_caught():
    from dataclasses import replace

    e = make_s2xs2(1.0, 2.0)
    lying = replace(e, known=replace(e.known, einstein=True))
    assert not lying.verify(n_points=3)["ok"]


def test_user_entry_matches_catalog_sphere():
    comps = [["0"] * 4 for _ in range(4)]
    for i in range(4):
        comps[i][i] = "4*r^4/(r^2 + x1^2 + x2^2 + x3^2 + x4^2)^2"
    user = user_entry("user_s4", comps, [-1.5] * 4, [1.5] * 4, {"r": 1.0})
    x = np.array([0.2, -0.1, 0.3, 0.05])
    assert np.allclose(point_geometry(user.chart, x).Rop, point_geometry(make_round_sphere(1.0).chart, x).Rop)
    assert user.verify(n_points=2)["ok"]


def test_get_entry_and_digest():
    assert get_entry("round_s4", r=2.0).params == {"r": 2.0}
    with pytest.raises(KeyError):
        get_entry("torus")
    recs = [e.verify(n_points=2) for e in default_catalog()[:2]]
    assert verification_digest(recs) == verification_digest(recs)
    assert len(verification_digest(recs)) == 16


def test_sample_points_inside_margins():
    e = make_round_sphere(1.0)
    pts = e.sample_points(50, seed=1)
    width = e.chart.upper - e.chart.lower
    assert np.all(pts > e.chart.lower + 0.1 * width - 1e-12)
    assert np.all(pts < e.chart.upper - 0.1 * width + 1e-12)
    assert np.array_equal(pts, e.sample_points(50, seed=1))
