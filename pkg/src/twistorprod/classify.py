"""Gil-Medrano conditions and Naveira class labels for (P, K_nu, G_t).

For a distribution D with complement D' and a G_t-orthonormal basis e_1..e_m
of D, write T(a, b, c) = G((D_{e_a} K)(e_b), f_c) with f_c running over a
basis of D'. The conditions are

    F   T(a, b, c) = T(b, a, c)            (integrable)
    D1  T(a, b, c) = -T(b, a, c)           (totally geodesic)
    D2  alpha(c) = sum_l T(l, l, c) = 0    (minimal)
    D3  T(a, b, c) + T(b, a, c) = 2/m delta_ab alpha(c)

Every residual is the largest absolute defect over a sample of base points
and points kappa of the fibre, with all basis triples at each kappa.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .bundle import (
    H, MetricParams, TwistorPoint, adapted_point, distribution_basis, random_kappa,
)
from .catalog import CatalogEntry
from .chart import ChartError
from .connection import daf_minus, daf_plus, nijenhuis

log = logging.getLogger(__name__)

CONDITIONS = ("F", "D1", "D2", "D3")
DISTRIBUTIONS = ("D", "perp")
TOLERANCE = {"analytic": 1e-6, "fd": 1e-4}

W1245 = "W1+W2+W4+W5"
W145 = "W1+W4+W5"
W14 = "W1+W4"
W45 = "W4+W5"
W4 = "W4"
UNCLASSIFIED = "unclassified"
LABELS = (W1245, W145, W14, W45, W4, UNCLASSIFIED)


@dataclass(frozen=True)
class SamplingConfig:
    base_points: int = 20
    kappas: int = 5
    seed: int = 0
    margin: float = 0.1

    MIN_BASE = 20
    MIN_KAPPAS = 5

    def __post_init__(self):
        if self.base_points < self.MIN_BASE or self.kappas < self.MIN_KAPPAS:
            raise ValueError(
                f"sampling needs >= {self.MIN_BASE} base points and >= {self.MIN_KAPPAS} kappas, "
                f"got {self.base_points}, {self.kappas}"
            )

    def doubled(self) -> "SamplingConfig":
        return replace(self, base_points=2 * self.base_points, seed=self.seed + 1)


def sample_kappas(entry: CatalogEntry, config: SamplingConfig) -> list[TwistorPoint]:
    """Quasi-random base points, uniform kappas; failing points are redrawn."""
    rng = np.random.default_rng(config.seed)
    out = []
    pts = entry.sample_points(4 * config.base_points, config.seed, config.margin)
    used = 0
    for x in pts:
        if used == config.base_points:
            break
        try:
            kappas = [random_kappa(entry.chart, x, rng) for _ in range(config.kappas)]
        except ChartError as exc:
            log.warning("redrawing sample at %s: %s", x, exc)
            continue
        out.extend(kappas)
        used += 1
    if used < config.base_points:
        raise ChartError(f"only {used} evaluable base points in chart {entry.id}")
    return out


def daf_tensor(nu: int, kappa: TwistorPoint, t: MetricParams, distribution: str = "D") -> np.ndarray:
    """T[a, b, c] on G_t-orthonormal bases of the distribution and its complement.

    For e in D one has e + K e = 2e, so the closed forms with A = 2e_a,
    B = 2e_b return 4 T; likewise for the complement with e - K e.
    """
    perp = distribution == "perp"
    basis = distribution_basis(nu, kappa, t, perp=perp)
    comp = distribution_basis(nu, kappa, t, perp=not perp)
    fn = daf_minus if perp else daf_plus
    ea = basis[:, None, None, :]
    eb = basis[None, :, None, :]
    fc = comp[None, None, :, :]
    val = fn(nu, kappa, t, ea[..., H], ea[..., 4:], eb[..., H], eb[..., 4:], fc[..., H], fc[..., 4:])
    return np.broadcast_to(val, (len(basis), len(basis), len(comp))) / 4.0


def condition_defects(T: np.ndarray) -> dict[str, np.ndarray]:
    m = T.shape[0]
    alpha = np.einsum("llc->c", T)
    sym = T + np.swapaxes(T, 0, 1)
    return {
        "F": T - np.swapaxes(T, 0, 1),
        "D1": sym,
        "D2": alpha,
        "D3": sym - (2.0 / m) * np.eye(m)[:, :, None] * alpha[None, None, :],
    }


@dataclass(frozen=True)
class AlphaForm:
    """alpha on a G_t-orthonormal basis of the complementary distribution."""

    x: np.ndarray
    sigma: np.ndarray
    distribution: str
    basis: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __call__(self, v) -> float:
        coeffs = self.basis @ (np.asarray(v, dtype=float) * self.weights)
        return float(self.values @ coeffs)


def alpha_form(distribution: str, nu: int, t: MetricParams, kappa: TwistorPoint) -> AlphaForm:
    perp = distribution == "perp"
    T = daf_tensor(nu, kappa, t, distribution)
    comp = distribution_basis(nu, kappa, t, perp=not perp)
    return AlphaForm(kappa.x, kappa.sigma, distribution, comp, t.weights, np.einsum("llc->c", T))


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    distribution: str
    residual: float
    samples: int
    tolerance: float
    verdict: str  # holds, fails or inconclusive
    witness: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "distribution": self.distribution,
            "residual": self.residual,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "witness": self.witness,
        }


def verdict_for(residual: float, tol: float) -> str:
    if residual < tol:
        return "holds"
    if residual > 100 * tol:
        return "fails"
    return "inconclusive"


def _scan(nu, t, kappas, distribution):
    """Largest defect per condition with its witness, over all kappas."""
    best = {c: (-1.0, None) for c in CONDITIONS}
    for k, kappa in enumerate(kappas):
        defects = condition_defects(daf_tensor(nu, kappa, t, distribution))
        for c, d in defects.items():
            idx = np.unravel_index(np.argmax(np.abs(d)), d.shape)
            val = float(np.abs(d[idx]))
            if val > best[c][0]:
                best[c] = (val, {"kappa_index": k, "x": kappa.x.tolist(),
                                 "sigma": kappa.sigma.tolist(), "indices": [int(i) for i in idx]})
    return best


def tolerance_for(entry: CatalogEntry, tier: str | None = None) -> float:
    if tier is None:
        tier = "analytic" if entry.chart.analytic else "fd"
    return TOLERANCE[tier]


def condition_reports(
    nu: int, t: MetricParams, entry: CatalogEntry, config: SamplingConfig, tol: float | None = None,
    kappas: list[TwistorPoint] | None = None,
) -> list[ConditionReport]:
    """All eight reports, doubling the sample budget once when a verdict is inconclusive."""
    tol = tolerance_for(entry) if tol is None else tol
    if kappas is None:
        kappas = sample_kappas(entry, config)
    reports = []
    for dist in DISTRIBUTIONS:
        best = _scan(nu, t, kappas, dist)
        n = len(kappas)
        if any(verdict_for(best[c][0], tol) == "inconclusive" for c in CONDITIONS):
            extra = sample_kappas(entry, config.doubled())
            more = _scan(nu, t, extra, dist)
            for c in CONDITIONS:
                if more[c][0] > best[c][0]:
                    best[c] = (more[c][0], {**more[c][1], "resampled": True})
            n += len(extra)
        for c in CONDITIONS:
            res, wit = best[c]
            reports.append(ConditionReport(c, dist, res, n, tol, verdict_for(res, tol), wit or {}))
    return reports


def condition_residual(
    condition: str, distribution: str, nu: int, t: MetricParams, entry: CatalogEntry,
    config: SamplingConfig, tol: float | None = None,
) -> ConditionReport:
    if condition not in CONDITIONS or distribution not in DISTRIBUTIONS:
        raise ValueError(f"unknown condition {condition!r} or distribution {distribution!r}")
    for r in condition_reports(nu, t, entry, config, tol):
        if r.condition == condition and r.distribution == distribution:
            return r
    raise AssertionError("unreachable")


def tg_consistent(reports: list[ConditionReport]) -> bool:
    """D1 holding must come with D2 and D3 holding on the same samples."""
    by = {(r.condition, r.distribution): r for r in reports}
    for dist in DISTRIBUTIONS:
        if ("D1", dist) in by and by["D1", dist].holds:
            if not (by["D2", dist].holds and by["D3", dist].holds):
                return False
    return True


def infer_label(nu: int, holds: dict[tuple[str, str], bool]) -> str:
    """Label from the verdict pattern, using only rows of the classification theorems."""
    d_tg, d_min, d_int = holds["D1", "D"], holds["D2", "D"], holds["F", "D"]
    p_tg, p_min = holds["D1", "perp"], holds["D2", "perp"]
    if nu == 3:
        if d_tg and d_int and p_tg:
            return W4
        if d_tg and d_int and p_min:
            return W45
        if d_tg and p_min:
            return W145
        return UNCLASSIFIED
    if d_tg and p_tg:
        return W14
    if d_tg and p_min:
        return W145
    if d_min and p_min:
        return W1245
    return UNCLASSIFIED


@dataclass(frozen=True)
class ClassReport:
    nu: int
    t: MetricParams
    chart_id: str
    conditions: list
    label: str
    summary: dict
    notes: list = field(default_factory=list)

    def holds(self, condition: str, distribution: str = "D") -> bool:
        for r in self.conditions:
            if r.condition == condition and r.distribution == distribution:
                return r.holds
        raise KeyError((condition, distribution))

    def pattern(self) -> dict[str, str]:
        return {f"{r.condition}/{r.distribution}": r.verdict for r in self.conditions}

    def to_dict(self) -> dict:
        return {
            "nu": self.nu,
            "t": [self.t.t1, self.t.t2],
            "chart": self.chart_id,
            "label": self.label,
            "summary": self.summary,
            "conditions": [r.to_dict() for r in self.conditions],
            "notes": list(self.notes),
        }


def classify(
    nu: int, t: MetricParams, entry: CatalogEntry, config: SamplingConfig | None = None,
    tol: float | None = None, kappas: list[TwistorPoint] | None = None,
) -> ClassReport:
    config = config or SamplingConfig()
    reports = condition_reports(nu, t, entry, config, tol, kappas)
    holds = {(r.condition, r.distribution): r.holds for r in reports}
    label = infer_label(nu, holds)
    summary = {
        dist: {"integrable": holds["F", dist], "minimal": holds["D2", dist],
               "totally_geodesic": holds["D1", dist]}
        for dist in DISTRIBUTIONS
    }
    notes = []
    if not tg_consistent(reports):
        notes.append("D1 holds without D2 and D3")
    s = entry.known.scalar(entry.chart.lower * 0) if entry.known.scalar else None
    if s is not None and s <= 0:
        notes.append("scalar curvature <= 0: rows with a critical parameter cannot occur")
    if label == UNCLASSIFIED:
        notes.append("pattern " + ", ".join(f"{k}={v}" for k, v in {f"{c}/{d}": h for (c, d), h in holds.items()}.items()))
    return ClassReport(nu, t, entry.id, reports, label, summary, notes)


# critical parameter ---------------------------------------------------------

class CriticalTError(ValueError):
    """The D1 residual has no interior minimum in the search interval."""


class PreconditionError(CriticalTError):
    """The chart is not Einstein with positive scalar curvature."""


@dataclass(frozen=True)
class CriticalTResult:
    nu: int
    which: str
    distribution: str
    t_star: float | None
    residual: float | None
    curve: list
    degenerate: bool
    scalar: float
    chi: float | None
    six_over_s: float
    three_over_8chi: float | None
    matches: dict
    tolerance: float

    @property
    def found(self) -> bool:
        """True when the minimum is an actual zero of the residual."""
        return self.t_star is not None and self.residual < self.tolerance

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["found"] = self.found
        return out


def _params(which: str, t: float, fixed: float) -> MetricParams:
    if which == "t1":
        return MetricParams(t, fixed)
    if which == "t2":
        return MetricParams(fixed, t)
    if which == "equal":
        return MetricParams(t, t)
    raise ValueError(f"which must be t1, t2 or equal, got {which!r}")


def d1_residual(nu, t, kappas, distribution="D") -> float:
    worst = 0.0
    for kappa in kappas:
        d = condition_defects(daf_tensor(nu, kappa, t, distribution))["D1"]
        worst = max(worst, float(np.abs(d).max()))
    return worst


def einstein_data(entry: CatalogEntry, kappas, tol: float):
    """(s, chi) averaged over the sampled points; chi is None unless the curvature is constant."""
    geos = {id(k.geo): k.geo for k in kappas}.values()
    s = np.array([g.scalar for g in geos])
    B = max(g.decomposition.norms()["B"] for g in geos)
    if B > tol:
        raise PreconditionError(f"chart {entry.id} is not Einstein (|B| = {B:.3g})")
    s_mean = float(s.mean())
    if s_mean <= tol:
        raise PreconditionError(f"chart {entry.id} has non-positive scalar curvature {s_mean:.3g}")
    const = max(float(np.abs(g.Rop - g.scalar / 6 * np.eye(6)).max()) for g in geos)
    chi = s_mean / 12 if const < tol else None
    return s_mean, chi


def critical_t_search(
    nu: int, which: str, entry: CatalogEntry, interval=(1e-3, 10.0), distribution: str = "D",
    fixed: float = 1.0, config: SamplingConfig | None = None, tol: float | None = None,
    grid: int = 40,
) -> CriticalTResult:
    """Golden-section search for the zero of the D1 residual in one parameter.

    The objective is the largest D1 defect on a fixed sample; it is
    piecewise affine in t up to the vertical basis scaling, with a V-shaped
    zero at a critical value. A grid scan brackets the minimum first.
    """
    config = config or SamplingConfig()
    tol = tolerance_for(entry) if tol is None else tol
    kappas = sample_kappas(entry, config)
    s, chi = einstein_data(entry, kappas, tol)

    def f(t):
        return d1_residual(nu, _params(which, t, fixed), kappas, distribution)

    lo, hi = interval
    ts = np.geomspace(lo, hi, grid)
    vals = np.array([f(t) for t in ts])
    curve = [[float(a), float(b)] for a, b in zip(ts, vals)]
    expected = {"6/s": 6.0 / s, "3/(8chi)": 3.0 / (8 * chi) if chi else None}
    if vals.max() < tol:
        return CriticalTResult(nu, which, distribution, None, float(vals.max()), curve, True, s, chi,
                               6.0 / s, expected["3/(8chi)"], {}, tol)
    i = int(np.argmin(vals))
    if i == 0 or i == grid - 1:
        raise CriticalTError(f"no interior minimum of the D1 residual in {interval}")
    res = optimize.minimize_scalar(f, bracket=(ts[i - 1], ts[i], ts[i + 1]), method="golden",
                                   tol=1e-10)
    t_star = float(res.x)
    matches = {k: (v is not None and abs(t_star - v) <= 1e-6 * max(1.0, v)) for k, v in expected.items()}
    return CriticalTResult(nu, which, distribution, t_star, float(res.fun), curve, False, s, chi,
                           6.0 / s, expected["3/(8chi)"], matches, tol)


# theorem table ---------------------------------------------------------------

@dataclass(frozen=True)
class TheoremRow:
    clause: str
    passed: bool
    detail: dict

    def to_dict(self) -> dict:
        return {"clause": self.clause, "passed": bool(self.passed), "detail": self.detail}


def nonint_witnesses(entry: CatalogEntry, x=None) -> dict[int, float]:
    """Defect of N_nu(E3^h or E1^h, U) from +-2 E2^h or -2 E4^h at kappa = (s1+, s1-), U = (s2+, 0)."""
    x = entry.chart.lower * 0 if x is None else x
    kappa = adapted_point(entry.chart, x, 0, 0)
    t = MetricParams(1.0, 1.0)
    U = np.zeros(10)
    U[5] = 1.0
    E = np.eye(4)
    out = {}
    for nu in (1, 2, 3, 4):
        A = np.zeros(10)
        if nu in (1, 2):
            A[H] = E[2]
            target = 2 * E[1]
        else:
            A[H] = E[0]
            target = -2 * E[3]
        n = nijenhuis(nu, kappa, t, A, U)
        out[nu] = float(max(np.abs(n.horizontal - target).max(), np.abs(n.vertical).max()))
    return out


def _is_constant_curvature(entry: CatalogEntry) -> bool:
    return entry.known.constant_curvature is not None


def verify_theorems(
    entries: list[CatalogEntry], t_grid=((0.7, 1.3), (2.0, 0.5)), config: SamplingConfig | None = None,
    clauses: list[str] | None = None, critical: bool = True, tol: float | None = None,
    dual_entries: list[CatalogEntry] = (),
) -> list[TheoremRow]:
    """One row per theorem clause, each decided numerically on every entry and t in the grid."""
    config = config or SamplingConfig()
    rows = []
    reports = {}
    for entry in list(entries) + list(dual_entries):
        kappas = sample_kappas(entry, config)
        for nu in (1, 2, 3, 4):
            for tt in t_grid:
                t = MetricParams(*tt)
                reports[entry.id, _orient(entry), nu, tuple(tt)] = classify(nu, t, entry, config, tol, kappas)
    pool = list(entries) + list(dual_entries)

    def every(pred):
        bad = [f"{k[0]}{k[1]} nu={k[2]} t={k[3]}" for k, rep in reports.items() if not pred(k, rep)]
        return not bad, {"violations": bad[:10], "cases": len(reports)}

    def add(clause, result):
        passed, detail = result
        rows.append(TheoremRow(clause, bool(passed), detail))

    def const(k):
        return _is_constant_curvature(_entry(pool, k))

    add("D-nonintegrable", every(lambda k, r: k[2] == 3 or not r.holds("F", "D")))
    add("D3-integrable-iff-constant-curvature", every(lambda k, r: k[2] != 3 or r.holds("F", "D") == const(k)))
    add("D-minimal", every(lambda k, r: r.holds("D2", "D")))
    add("D3-totally-geodesic", every(lambda k, r: k[2] != 3 or r.holds("D1", "D")))
    add("Dperp-nonintegrable", every(lambda k, r: k[2] == 1 or not r.holds("F", "perp")))
    add("D1perp-integrable-iff-constant-curvature",
        every(lambda k, r: k[2] != 1 or r.holds("F", "perp") == const(k)))
    add("Dperp-minimal", every(lambda k, r: r.holds("D2", "perp")))
    add("D1perp-totally-geodesic", every(lambda k, r: k[2] != 1 or r.holds("D1", "perp")))
    add("tg-implies-minimal", every(lambda k, r: tg_consistent(r.conditions)))
    add("predicted-labels", every(lambda k, r: r.label == predicted_label(k[2], _entry(pool, k), MetricParams(*k[3]))))

    wit = {e.id + _orient(e): nonint_witnesses(e) for e in pool}
    add("nonint-witnesses", (all(v < 1e-10 for w in wit.values() for v in w.values()), {"defects": wit}))

    if dual_entries:
        bad = []
        for d in dual_entries:
            for tt in t_grid:
                for nu, mu in ((2, 4), (4, 2)):
                    a = reports[d.id, "", nu, tuple(tt)] if (d.id, "", nu, tuple(tt)) in reports else None
                    swapped = (tt[1], tt[0])
                    key_b = (d.id, _orient(d), mu, tuple(swapped))
                    if a is None:
                        continue
                    b = reports.get(key_b) or classify(mu, MetricParams(*swapped), d, config, tol)
                    if a.pattern() != b.pattern() or a.label != b.label:
                        bad.append(f"{d.id} nu={nu} t={tt}")
        add("orientation-duality", (not bad, {"violations": bad}))

    if critical:
        crit_rows, detail = critical_rows(pool, config, tol)
        add("critical-parameters", (all(r["ok"] for r in crit_rows), {"searches": crit_rows, **detail}))

    if clauses:
        rows = [r for r in rows if r.clause in clauses]
    return rows


def _positive_einstein(entry: CatalogEntry) -> bool:
    k = entry.known
    return bool(k.einstein) and k.scalar is not None and k.scalar(entry.chart.lower * 0) > 0


def critical_rows(entries, config, tol=None, fixed: float = 1.0):
    """Search every critical parameter predicted by the classification theorems.

    A search is expected to find a zero exactly when the Weyl half it
    probes vanishes; the label at the found value is then compared with the
    theorem tables. Each found value is compared with 6/s and 3/(8 chi).
    """
    rows = []
    for entry in entries:
        if not _positive_einstein(entry):
            continue
        k = entry.known
        const = _is_constant_curvature(entry)
        cases = [(2, "t1", "D", bool(k.anti_self_dual), W145), (4, "t2", "D", bool(k.self_dual), W145)]
        if const:
            cases += [(1, "equal", "D", True, W14), (3, "equal", "perp", True, W4)]
        for nu, which, dist, expect, label in cases:
            row = {"chart": entry.id + _orient(entry), "nu": nu, "which": which, "distribution": dist,
                   "expected": expect}
            try:
                res = critical_t_search(nu, which, entry, distribution=dist, fixed=fixed, config=config, tol=tol)
                found = res.found
                row.update(t_star=res.t_star, residual=res.residual, six_over_s=res.six_over_s,
                           three_over_8chi=res.three_over_8chi, matches=res.matches)
            except PreconditionError:
                raise
            except CriticalTError as exc:
                found, res = False, None
                row["error"] = str(exc)
            row["found"] = found
            ok = found == expect
            if found:
                t = _params(which, res.t_star, fixed)
                got = classify(nu, t, entry, config, tol).label
                row["label"] = got
                ok = ok and got == label
            row["ok"] = bool(ok)
            rows.append(row)
    summary = {
        "all_match_6_over_s": all(r.get("matches", {}).get("6/s", False) for r in rows if r["found"]),
        "any_match_3_over_8chi": any(r.get("matches", {}).get("3/(8chi)", False) for r in rows if r["found"]),
    }
    return rows, summary


def _orient(entry):
    return "" if entry.chart.orientation == 1 else "(-)"


def _entry(entries, key):
    for e in entries:
        if e.id == key[0] and _orient(e) == key[1]:
            return e
    raise KeyError(key)


def predicted_label(nu: int, entry: CatalogEntry, t: MetricParams, rtol: float = 1e-9) -> str:
    """Label the classification theorems assign to (entry, nu, t), with 6/s as the critical value."""
    k = entry.known
    const = _is_constant_curvature(entry)
    crit = None
    if _positive_einstein(entry):
        crit = 6.0 / k.scalar(entry.chart.lower * 0)

    def at(v):
        return crit is not None and abs(v - crit) <= rtol * crit

    asd, sd = bool(k.anti_self_dual), bool(k.self_dual)
    if nu == 3:
        if not const:
            return W145
        return W4 if at(t.t1) and at(t.t2) else W45
    d_tg = {1: const and at(t.t1) and at(t.t2), 2: asd and at(t.t1), 4: sd and at(t.t2)}[nu]
    p_tg = {1: True, 2: sd and at(t.t2), 4: asd and at(t.t1)}[nu]
    if d_tg and p_tg:
        return W14
    if d_tg:
        return W145
    return W1245
