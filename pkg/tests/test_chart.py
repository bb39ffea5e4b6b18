import numpy as np
import pytest

from twistorprod.catalog import finite_difference_entry, make_flat, make_round_sphere
from twistorprod.chart import (
    ChartError, DegenerateMetric, MetricChart, PointOutsideDomain, christoffel, connection_matrices,
    frame_derivative, orthonormal_frame, riemann,
)


def test_flat_christoffel_and_curvature_vanish():
    chart = make_flat().chart
    x = np.array([0.1, 0.2, -0.3, 0.4])
    assert np.abs(christoffel(chart, x)).max() == 0
    assert np.abs(riemann(chart, x).R).max() == 0


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_sphere_sectional_curvature(r, rng):
    entry = make_round_sphere(r)
    for x in entry.sample_points(5, seed=3):
        curv = riemann(entry.chart, x)
        for _ in range(4):
            X, Y = rng.normal(size=(2, 4))
            assert curv.sectional(X, Y) == pytest.approx(1 / r**2, rel=1e-9)
        assert curv.scalar == pytest.approx(12 / r**2, rel=1e-9)


def test_riemann_symmetries(catalog):
    for entry in catalog:
        x = entry.sample_points(1, seed=5)[0]
        defects = riemann(entry.chart, x).symmetry_defects()
        assert max(defects.values()) < 1e-9, (entry.id, defects)


def test_frame_is_orthonormal_and_oriented(catalog):
    for entry in catalog:
        for o in (1, -1):
            chart = entry.chart.with_orientation(o)
            x = entry.sample_points(1, seed=2)[0]
            fr = orthonormal_frame(chart, x)
            assert np.allclose(fr.gram, np.eye(4), atol=1e-12)
            assert np.sign(np.linalg.det(fr.E)) == o


def test_frame_derivative_matches_differences(catalog):
    h = 1e-6
    for entry in catalog:
        x = entry.sample_points(1, seed=4)[0]
        dE = frame_derivative(entry.chart, x)
        for c in range(4):
            e = np.zeros(4)
            e[c] = h
            fd = (orthonormal_frame(entry.chart, x + e).E - orthonormal_frame(entry.chart, x - e).E) / (2 * h)
            assert np.allclose(dE[c], fd, atol=1e-7)


def test_connection_matrices_skew(catalog):
    for entry in catalog:
        x = entry.sample_points(1, seed=6)[0]
        w = connection_matrices(entry.chart, x)
        assert np.abs(w + w.transpose(0, 2, 1)).max() < 1e-12


def test_finite_difference_partials_close_to_analytic(catalog):
    for entry in catalog:
        fd = finite_difference_entry(entry)
        assert not fd.chart.analytic
        x = entry.sample_points(1, seed=8)[0]
        assert np.abs(riemann(fd.chart, x).R - riemann(entry.chart, x).R).max() < 1e-6


def test_domain_and_degeneracy_errors():
    chart = make_flat().chart
    with pytest.raises(PointOutsideDomain):
        riemann(chart, [2.0, 0, 0, 0])
    with pytest.raises(ChartError):
        riemann(chart, [0.0, 0.0])
    bad = MetricChart("bad", -np.ones(4), np.ones(4), lambda x: np.diag([1.0, 1.0, 1.0, -1.0]),
                      lambda x: np.zeros((4, 4, 4)), lambda x: np.zeros((4, 4, 4, 4)))
    with pytest.raises(DegenerateMetric):
        riemann(bad, np.zeros(4))
    with pytest.raises(ChartError):
        MetricChart("empty", np.ones(4), np.ones(4), lambda x: np.eye(4))
