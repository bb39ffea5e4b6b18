import numpy as np
import pytest

from twistorprod.bundle import MetricParams, distribution_basis, random_kappa
from twistorprod.catalog import make_cp2, make_flat, make_perturbed_flat, make_s2xs2
from twistorprod.classify import (
    LABELS, TOLERANCE, W4, W14, W45, W145, W1245, ConditionReport, CriticalTError, PreconditionError,
    SamplingConfig, alpha_form, classify, condition_defects, condition_reports, critical_t_search,
    d1_residual, daf_tensor, infer_label, predicted_label, tg_consistent, sample_kappas,
    verdict_for,
)

CFG = SamplingConfig()


def test_sampling_minima():
    with pytest.raises(ValueError):
        SamplingConfig(base_points=19)
    with pytest.raises(ValueError):
        SamplingConfig(kappas=4)
    d = CFG.doubled()
    assert d.base_points == 40 and d.seed != CFG.seed


def test_samples_are_reproducible(sphere):
    a = sample_kappas(sphere, CFG)
    b = sample_kappas(sphere, CFG)
    assert len(a) == 100
    assert all(np.array_equal(p.sigma, q.sigma) and np.array_equal(p.x, q.x) for p, q in zip(a, b))


def test_verdicts():
    assert verdict_for(1e-9, 1e-6) == "holds"
    assert verdict_for(5e-5, 1e-6) == "inconclusive"
    assert verdict_for(1e-3, 1e-6) == "fails"


def test_condition_algebra():
    rng = np.random.default_rng(1)
    T = rng.normal(size=(4, 4, 4))
    d = condition_defects(T)
    assert np.allclose(d["F"] + d["D1"], 2 * T)
    # D1 = 0 forces D2 = D3 = 0
    A = T - np.swapaxes(T, 0, 1)
    d = condition_defects(A)
    assert np.allclose(d["D1"], 0) and np.allclose(d["D2"], 0) and np.allclose(d["D3"], 0)


def test_distribution_bases_split_tangent_space(catalog, rng):
    for entry in catalog:
        kappa = random_kappa(entry.chart, entry.sample_points(1, seed=3)[0], rng)
        t = MetricParams(0.6, 1.9)
        for nu in (1, 2, 3, 4):
            D = distribution_basis(nu, kappa, t)
            Dp = distribution_basis(nu, kappa, t, perp=True)
            assert len(D) + len(Dp) == 8
            assert np.allclose((D * t.weights) @ Dp.T, 0)


@pytest.mark.parametrize("distribution", ["D", "perp"])
def test_alpha_vanishes_for_all_t(distribution, catalog, rng):
    for entry in catalog:
        kappa = random_kappa(entry.chart, entry.sample_points(1, seed=4)[0], rng)
        for t in (MetricParams(0.4, 1.7), MetricParams(4.0, 17.0)):
            for nu in (1, 2, 3, 4):
                a = alpha_form(distribution, nu, t, kappa)
                assert np.abs(a.values).max() < 1e-12
                assert abs(a(np.ones(10))) < 1e-12


def test_infer_label_table():
    def pat(**kw):
        base = {(c, d): False for c in ("F", "D1", "D2", "D3") for d in ("D", "perp")}
        for k, v in kw.items():
            c, d = k.split("_")
            base[c, d] = v
        return base

    assert infer_label(2, pat(D2_D=True, D2_perp=True)) == W1245
    assert infer_label(2, pat(D1_D=True, D2_D=True, D2_perp=True)) == W145
    assert infer_label(4, pat(D1_D=True, D1_perp=True)) == W14
    assert infer_label(3, pat(F_D=True, D1_D=True, D1_perp=True)) == W4
    assert infer_label(3, pat(F_D=True, D1_D=True, D2_perp=True)) == W45
    assert infer_label(3, pat(D1_D=True, D2_perp=True)) == W145
    assert infer_label(1, pat()) == "unclassified"
    assert set(LABELS) >= {W4, W14, W45, W145, W1245}


def test_tg_consistency_detects_gaps():
    good = [ConditionReport(c, "D", 0.0, 1, 1e-6, "holds", {}) for c in ("D1", "D2", "D3")]
    assert tg_consistent(good)
    bad = good[:1] + [ConditionReport("D2", "D", 1.0, 1, 1e-6, "fails", {})] + good[2:]
    assert not tg_consistent(bad)


@pytest.mark.parametrize("nu", [1, 2, 3, 4])
def test_generic_labels_match_prediction(nu, catalog):
    t = MetricParams(0.7, 1.3)
    for entry in catalog:
        rep = classify(nu, t, entry, CFG)
        assert rep.label == predicted_label(nu, entry, t), (entry.id, rep.pattern())
        assert not rep.notes or entry.id in ("flat",) or "scalar" in rep.notes[0]


def test_sphere_labels_at_critical_point(sphere):
    t = MetricParams(0.5, 0.5)
    assert classify(3, t, sphere, CFG).label == W4
    for nu in (1, 2, 4):
        assert classify(nu, t, sphere, CFG).label == W14


def test_orientation_flip_swaps_two_and_four():
    plus, minus = make_cp2(1), make_cp2(-1)
    crit = 6.0 / plus.known.scalar(np.zeros(4))
    assert crit == pytest.approx(0.25)
    assert classify(4, MetricParams(1.0, crit), plus, CFG).label == W145
    assert classify(2, MetricParams(crit, 1.0), plus, CFG).label == W1245
    assert classify(2, MetricParams(crit, 1.0), minus, CFG).label == W145
    assert classify(4, MetricParams(1.0, crit), minus, CFG).label == W1245


def test_f_for_d3_separates_charts():
    t = MetricParams(1.0, 1.0)
    for entry, holds in ((make_s2xs2(1.0, 1.0), False), (make_cp2(1), False)):
        rep = classify(3, t, entry, CFG)
        assert rep.holds("F", "D") is holds


def test_reports_are_stable_under_doubling(cp2):
    t = MetricParams(0.7, 1.3)
    a = {(r.condition, r.distribution): r.verdict for r in condition_reports(2, t, cp2, CFG)}
    b = {(r.condition, r.distribution): r.verdict for r in condition_reports(2, t, cp2, CFG.doubled())}
    assert a == b


def test_residual_has_unique_zero_on_grid(sphere):
    kappas = sample_kappas(sphere, CFG)[:25]
    ts = np.linspace(0.1, 3.0, 59)
    vals = np.array([d1_residual(2, MetricParams(t, 1.0), kappas) for t in ts])
    zeros = ts[vals < 1e-9]
    assert np.allclose(zeros, [0.5])


def test_critical_search_on_sphere(sphere):
    res = critical_t_search(3, "equal", sphere, distribution="perp", grid=24)
    assert res.found
    assert res.t_star == pytest.approx(0.5, abs=1e-6)
    assert res.matches["6/s"] and not res.matches["3/(8chi)"]
    assert d1_residual(3, MetricParams(0.75, 0.75), sample_kappas(sphere, CFG), "perp") > 1e-3


def test_critical_search_degenerate_case(sphere):
    res = critical_t_search(3, "equal", sphere, distribution="D", grid=8)
    assert res.degenerate and res.t_star is None


def test_critical_search_without_zero(cp2):
    res = critical_t_search(2, "t1", cp2, grid=24)
    assert not res.found and res.residual > 1.0


def test_critical_search_preconditions():
    with pytest.raises(PreconditionError):
        critical_t_search(2, "t1", make_perturbed_flat(), grid=8)
    with pytest.raises(PreconditionError):
        critical_t_search(2, "t1", make_flat(), grid=8)
    assert issubclass(PreconditionError, CriticalTError)


def test_tolerance_tiers():
    assert TOLERANCE == {"analytic": 1e-6, "fd": 1e-4}


def test_daf_tensor_shapes(sphere, rng):
    kappa = random_kappa(sphere.chart, np.zeros(4), rng)
    t = MetricParams(1.0, 1.0)
    assert daf_tensor(3, kappa, t, "D").shape == (2, 2, 6)
    assert daf_tensor(3, kappa, t, "perp").shape == (6, 6, 2)
    assert daf_tensor(2, kappa, t).shape == (4, 4, 4)


@pytest.mark.parametrize("nu", [1, 2])
def test_unequal_product_is_generic(nu):
    entry = make_s2xs2(1.0, 2.0)
    for t in (MetricParams(0.7, 1.3), MetricParams(0.2, 0.2)):
        assert classify(nu, t, entry, CFG).label == W1245


def test_cp2_search_has_sharp_zero(cp2):
    res = critical_t_search(4, "t2", cp2, grid=24)
    assert res.found and res.t_star == pytest.approx(0.25, abs=1e-6)
    kappas = sample_kappas(cp2, CFG)
    assert d1_residual(4, MetricParams(1.0, 2 * res.t_star), kappas) > 100 * TOLERANCE["analytic"]
