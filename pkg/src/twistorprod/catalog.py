"""Built-in charts with analytic first and second partials.

Each factory returns a :class:`CatalogEntry` carrying the chart and the
curvature properties the metric is expected to have. Those claims are only
claims: :meth:`CatalogEntry.verify` recomputes them numerically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sp

from .bivector import point_geometry
from .chart import MetricChart, DegenerateMetric
from .expr import COORDS, compile_metric

x1, x2, x3, x4 = COORDS


@dataclass(frozen=True)
class KnownProperties:
    einstein: bool | None  # None: no claim
    constant_curvature: float | None  # sectional curvature when constant
    self_dual: bool | None  # W- = 0
    anti_self_dual: bool | None  # W+ = 0
    scalar: Callable[[np.ndarray], float] | None = None


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    chart: MetricChart
    known: KnownProperties
    params: dict = field(default_factory=dict)

    def sample_points(self, n: int, seed: int = 0, margin: float = 0.1) -> np.ndarray:
        from scipy.stats import qmc

        lo, hi = self.chart.lower, self.chart.upper
        width = hi - lo
        sampler = qmc.Halton(d=4, scramble=True, seed=seed)
        u = sampler.random(n)
        return lo + width * (margin + (1 - 2 * margin) * u)

    def verify(self, n_points: int = 5, seed: int = 0, tol: float = 1e-6) -> dict:
        """Recompute the claimed properties at quasi-random points.

        Returns a record of the maximal block norms; ``ok`` is False when a
        claim is contradicted (a vanishing claim above `tol`, or a
        non-vanishing claim below ``100 * tol``).
        """
        maxima = {"B": 0.0, "W_plus": 0.0, "W_minus": 0.0, "scalar_err": 0.0, "const_err": 0.0}
        minima = {"B": np.inf, "W_plus": np.inf, "W_minus": np.inf}
        for x in self.sample_points(n_points, seed):
            geo = point_geometry(self.chart, x)
            norms = geo.decomposition.norms()
            for k, v in norms.items():
                maxima[k] = max(maxima[k], v)
                minima[k] = min(minima[k], v)
            if self.known.scalar is not None:
                maxima["scalar_err"] = max(maxima["scalar_err"], abs(geo.scalar - self.known.scalar(x)))
            if self.known.constant_curvature is not None:
                target = 2 * self.known.constant_curvature * np.eye(6)
                maxima["const_err"] = max(maxima["const_err"], float(np.abs(geo.Rop - target).max()))
        k = self.known

        def claim(flag, key):
            if flag is None:
                return True
            return maxima[key] < tol if flag else minima[key] > 100 * tol

        checks = {
            "einstein": claim(k.einstein, "B"),
            "self_dual": claim(k.self_dual, "W_minus"),
            "anti_self_dual": claim(k.anti_self_dual, "W_plus"),
            "scalar": maxima["scalar_err"] < tol,
            "constant_curvature": maxima["const_err"] < tol,
        }
        return {
            "id": self.id,
            "ok": all(checks.values()),
            "checks": checks,
            "max": {k: float(v) for k, v in maxima.items()},
            "min": {k: float(v) for k, v in minima.items()},
        }


def _chart_from_sympy(name, gmat, lower, upper, orientation=1, params=None) -> MetricChart:
    g, dg, d2g = compile_metric(gmat)
    return MetricChart(name, np.asarray(lower, float), np.asarray(upper, float), g, dg, d2g,
                       orientation, dict(params or {}))


@lru_cache(maxsize=None)
def _flat_chart():
    return _chart_from_sympy("flat", sp.eye(4), [-1] * 4, [1] * 4)


def make_flat() -> CatalogEntry:
    return CatalogEntry("flat", _flat_chart(), KnownProperties(True, 0.0, True, True, lambda x: 0.0))


@lru_cache(maxsize=None)
def _sphere_chart(r: float):
    rr = sp.Float(r)
    q = x1**2 + x2**2 + x3**2 + x4**2
    conf = 4 * rr**4 / (rr**2 + q) ** 2
    return _chart_from_sympy("round_s4", conf * sp.eye(4), [-1.5 * r] * 4, [1.5 * r] * 4, params={"r": r})


def make_round_sphere(r: float = 1.0) -> CatalogEntry:
    """Stereographic chart of the round 4-sphere of radius r."""
    if r <= 0:
        raise ValueError("radius must be positive")
    chi = 1.0 / r**2
    return CatalogEntry(
        "round_s4", _sphere_chart(float(r)),
        KnownProperties(True, chi, True, True, lambda x: 12 * chi), {"r": float(r)},
    )


@lru_cache(maxsize=None)
def _cp2_chart(orientation: int):
    # z1 = x1 + i x2, z2 = x3 + i x4; holomorphic sectional curvature 4
    n = 1 + x1**2 + x2**2 + x3**2 + x4**2
    zbar = [x1 - sp.I * x2, x3 - sp.I * x4]
    # coefficients of sum_j zbar_j dz_j on dx1..dx4
    c = [zbar[0], sp.I * zbar[0], zbar[1], sp.I * zbar[1]]
    gmat = sp.zeros(4, 4)
    for a in range(4):
        for b in range(4):
            term = sp.re(sp.expand(sp.conjugate(c[a]) * c[b]))
            gmat[a, b] = (sp.KroneckerDelta(a, b) / n) - sp.simplify(term) / n**2
    return _chart_from_sympy("cp2", gmat, [-1.5] * 4, [1.5] * 4, orientation, {"orientation": orientation})


def make_cp2(orientation: int = 1) -> CatalogEntry:
    """Fubini-Study metric on the affine chart C^2 of CP^2, scalar curvature 24.

    ``orientation=+1`` is the complex orientation, under which the Kaehler
    form is self-dual and the metric has W- = 0; ``-1`` reverses it.
    """
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    return CatalogEntry(
        "cp2", _cp2_chart(orientation),
        KnownProperties(True, None, orientation == 1, orientation == -1, lambda x: 24.0),
        {"orientation": orientation},
    )


@lru_cache(maxsize=None)
def _s2xs2_chart(a: float, b: float):
    A, B = sp.Float(a), sp.Float(b)
    f1 = 4 * A**4 / (A**2 + x1**2 + x2**2) ** 2
    f2 = 4 * B**4 / (B**2 + x3**2 + x4**2) ** 2
    gmat = sp.diag(f1, f1, f2, f2)
    lower = [-1.5 * a, -1.5 * a, -1.5 * b, -1.5 * b]
    return _chart_from_sympy("s2xs2", gmat, lower, [-v for v in lower], params={"a": a, "b": b})


def make_s2xs2(a: float = 1.0, b: float = 1.0) -> CatalogEntry:
    """Product of round 2-spheres of radii a and b, stereographic on each factor."""
    if a <= 0 or b <= 0:
        raise ValueError("radii must be positive")
    s = 2 / a**2 + 2 / b**2
    return CatalogEntry(
        "s2xs2", _s2xs2_chart(float(a), float(b)),
        KnownProperties(a == b, None, False, False, lambda x: s), {"a": float(a), "b": float(b)},
    )


@lru_cache(maxsize=None)
def _perturbed_chart(amplitude: float, seed: int):
    rng = np.random.default_rng(seed)
    X = sp.Matrix(COORDS)
    Q = rng.normal(size=(4, 4))
    Q = sp.Matrix(0.5 * (Q + Q.T))
    cubic = rng.normal(size=4)
    M = sp.Matrix(rng.normal(size=(4, 4)))
    amp = sp.Float(amplitude)
    f = amp * ((X.T * Q * X)[0, 0] / 2 + sum(sp.Float(cubic[i]) * COORDS[i] ** 3 for i in range(4)) / 3)
    u = M * X
    gmat = sp.exp(2 * f) * sp.eye(4) + amp * (u * u.T)
    return _chart_from_sympy("perturbed_flat", gmat, [-1] * 4, [1] * 4,
                             params={"amplitude": amplitude, "seed": seed})


def make_perturbed_flat(amplitude: float = 0.1, seed: int = 7) -> CatalogEntry:
    """``g = exp(2f) delta + amplitude * u u^T`` with seeded polynomial f and linear u.

    The rank-one term keeps the metric positive definite for every amplitude
    >= 0 and breaks conformal flatness, so all four curvature blocks are
    generically nonzero.
    """
    if amplitude < 0:
        raise DegenerateMetric("negative amplitude can make the metric indefinite")
    flat = amplitude == 0
    return CatalogEntry(
        "perturbed_flat", _perturbed_chart(float(amplitude), int(seed)),
        KnownProperties(flat, 0.0 if flat else None, flat, flat, (lambda x: 0.0) if flat else None),
        {"amplitude": float(amplitude), "seed": int(seed)},
    )


FACTORIES = {
    "flat": make_flat,
    "round_s4": make_round_sphere,
    "cp2": make_cp2,
    "s2xs2": make_s2xs2,
    "perturbed_flat": make_perturbed_flat,
}


def get_entry(chart_id: str, **params) -> CatalogEntry:
    try:
        factory = FACTORIES[chart_id]
    except KeyError:
        raise KeyError(f"unknown chart id {chart_id!r}; known: {sorted(FACTORIES)}") from None
    return factory(**params)


def reoriented(entry: CatalogEntry) -> CatalogEntry:
    """The same metric with the opposite orientation; the Weyl claims swap."""
    k = entry.known
    known = KnownProperties(k.einstein, k.constant_curvature, k.anti_self_dual, k.self_dual, k.scalar)
    chart = entry.chart.with_orientation(-entry.chart.orientation)
    params = dict(entry.params)
    if "orientation" in params:
        params["orientation"] = chart.orientation
    return CatalogEntry(entry.id, chart, known, params)


def finite_difference_entry(entry: CatalogEntry) -> CatalogEntry:
    """Drop the analytic partials so that every derivative comes from the stencil."""
    from dataclasses import replace

    return replace(entry, chart=replace(entry.chart, dg=None, d2g=None))


def user_entry(name: str, components, lower, upper, params=None, orientation: int = 1) -> CatalogEntry:
    """A chart from metric component strings; no curvature claims are attached."""
    from .expr import parse_expression

    params = dict(params or {})
    gmat = sp.Matrix(4, 4, lambda a, b: parse_expression(components[min(a, b)][max(a, b)], params))
    chart = _chart_from_sympy(name, gmat, lower, upper, orientation, params)
    return CatalogEntry(name, chart, KnownProperties(None, None, None, None), params)


def default_catalog() -> list[CatalogEntry]:
    """The five entries used by the verification suites."""
    return [make_flat(), make_round_sphere(1.0), make_cp2(1), make_s2xs2(1.0, 2.0), make_perturbed_flat(0.1, 7)]


def verification_digest(records: list[dict]) -> str:
    blob = json.dumps(records, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
