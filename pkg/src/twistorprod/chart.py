"""Metric, Levi-Civita connection and curvature on a single 4-dimensional chart.

Curvature sign
--------------
The curvature endomorphism is stored with the convention

    R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y],

which is minus the more common ``[nabla_X, nabla_Y] - nabla_[X,Y]``. In
this convention ``g(R(X, Y)X, Y)`` is the sectional curvature of the plane
spanned by orthonormal X, Y (positive on a round sphere), and the curvature
operator on bivectors is positive on a round sphere as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DIM = 4


class ChartError(ValueError):
    """Base class for chart evaluation failures."""


class PointOutsideDomain(ChartError):
    pass


class DegenerateMetric(ChartError):
    pass


@dataclass(frozen=True)
class MetricChart:
    """A coordinate box of an oriented Riemannian 4-manifold.

    ``dg(x)[c, a, b]`` and ``d2g(x)[c, d, a, b]`` are the analytic first and
    second partials of the metric components; when absent they are replaced by
    Richardson-extrapolated central differences with step ``fd_step * scale``.
    ``orientation`` is +1 when the coordinate basis is positively oriented.
    """

    name: str
    lower: np.ndarray
    upper: np.ndarray
    g: Callable[[np.ndarray], np.ndarray]
    dg: Callable[[np.ndarray], np.ndarray] | None = None
    d2g: Callable[[np.ndarray], np.ndarray] | None = None
    orientation: int = 1
    params: dict = field(default_factory=dict)
    fd_step: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        if self.lower.shape != (DIM,) or self.upper.shape != (DIM,):
            raise ChartError("chart bounds must have 4 entries")
        if np.any(self.upper <= self.lower):
            raise ChartError("empty chart domain")
        if self.orientation not in (1, -1):
            raise ChartError("orientation must be +1 or -1")

    @property
    def analytic(self) -> bool:
        return self.dg is not None and self.d2g is not None

    @property
    def scale(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def tolerance(self) -> float:
        """Identity tolerance appropriate for how derivatives are obtained."""
        return 1e-9 if self.analytic else 1e-5

    def margin(self) -> np.ndarray:
        return np.zeros(DIM) if self.analytic else 3 * self.fd_step * self.scale

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (DIM,):
            raise ChartError(f"expected 4 coordinates, got shape {x.shape}")
        m = self.margin()
        if np.any(x <= self.lower + m) or np.any(x >= self.upper - m):
            raise PointOutsideDomain(f"{x} is not inside the domain of chart {self.name!r}")
        return x

    def with_orientation(self, orientation: int) -> "MetricChart":
        params = dict(self.params, orientation=orientation)
        return MetricChart(
            self.name, self.lower, self.upper, self.g, self.dg, self.d2g,
            orientation, params, self.fd_step,
        )


def _central(f, x, h, axis):
    e = np.zeros(DIM)
    e[axis] = h
    return (f(x + e) - f(x - e)) / (2 * h)


def _richardson_first(f, x, h):
    out = []
    for c in range(DIM):
        d1 = _central(f, x, h[c], c)
        d2 = _central(f, x, h[c] / 2, c)
        out.append((4 * d2 - d1) / 3)
    return np.stack(out)


def metric_partials(chart: MetricChart, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Metric components with first and second partials at `x`."""
    x = chart.check_point(x)
    g = np.asarray(chart.g(x), dtype=float)
    if not np.allclose(g, g.T, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise DegenerateMetric(f"metric of {chart.name!r} is not symmetric at {x}")
    h = chart.fd_step * chart.scale
    dg = chart.dg(x) if chart.dg is not None else _richardson_first(chart.g, x, h)
    if chart.d2g is not None:
        d2g = chart.d2g(x)
    else:
        first = chart.dg if chart.dg is not None else (lambda y: _richardson_first(chart.g, y, h))
        d2g = _richardson_first(first, x, h)
        d2g = 0.5 * (d2g + d2g.transpose(1, 0, 2, 3))
    return g, np.asarray(dg, dtype=float), np.asarray(d2g, dtype=float)


def _cholesky(g, chart, x):
    try:
        return np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetric(f"metric of {chart.name!r} is not positive definite at {x}") from None


def christoffel(chart: MetricChart, x) -> np.ndarray:
    """Christoffel symbols ``gamma[c, a, b]`` of the second kind at `x`."""
    g, dg, _ = metric_partials(chart, x)
    _cholesky(g, chart, x)
    return _christoffel(g, dg)


def _christoffel(g, dg):
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)  # [e, a, b]
    return np.linalg.solve(g, low.reshape(DIM, -1)).reshape(DIM, DIM, DIM)


@dataclass(frozen=True)
class CurvatureTensor:
    """Riemann tensor in coordinates: ``R[a, b, c, d] = g(R(d_a, d_b) d_c, d_d)``.

    ``ricci`` holds the covariant Ricci tensor, ``rho`` the Ricci operator
    (``rho[a, b]`` is component a of rho(d_b)) and ``scalar`` the scalar
    curvature.
    """

    x: np.ndarray
    R: np.ndarray
    ricci: np.ndarray
    rho: np.ndarray
    scalar: float
    g: np.ndarray

    def symmetry_defects(self) -> dict[str, float]:
        R = self.R
        return {
            "antisym_ab": float(np.abs(R + R.transpose(1, 0, 2, 3)).max()),
            "antisym_cd": float(np.abs(R + R.transpose(0, 1, 3, 2)).max()),
            "pair": float(np.abs(R - R.transpose(2, 3, 0, 1)).max()),
            "bianchi": float(np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)).max()),
        }

    def sectional(self, X, Y) -> float:
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        num = np.einsum("abcd,a,b,c,d->", self.R, X, Y, X, Y)
        area = (X @ self.g @ X) * (Y @ self.g @ Y) - (X @ self.g @ Y) ** 2
        return float(num / area)


def riemann(chart: MetricChart, x) -> CurvatureTensor:
    x = np.asarray(x, dtype=float)
    g, dg, d2g = metric_partials(chart, x)
    _cholesky(g, chart, x)
    ginv = np.linalg.inv(g)
    gam = _christoffel(g, dg)
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    # d_low[d, e, a, b] = partial_d of the first-kind symbol [e, a, b]
    d_low = 0.5 * (
        d2g.transpose(0, 2, 1, 3) + d2g.transpose(0, 2, 3, 1) - d2g
    )
    dginv = -np.einsum("ce,def,fg->dcg", ginv, dg, ginv)
    # d_gam[d, c, a, b] = partial_d Gamma^c_ab
    d_gam = np.einsum("dce,eab->dcab", dginv, low) + np.einsum("ce,deab->dcab", ginv, d_low)
    # usual-sign tensor  Rstd[r, s, m, n] with Rstd(d_m, d_n) d_s = Rstd[r, s, m, n] d_r
    rstd = (
        np.einsum("mrns->rsmn", d_gam)
        - np.einsum("nrms->rsmn", d_gam)
        + np.einsum("rml,lns->rsmn", gam, gam)
        - np.einsum("rnl,lms->rsmn", gam, gam)
    )
    # stored sign is the opposite one
    R = -np.einsum("kr,rsmn->mnsk", g, rstd)
    ricci = np.einsum("ac,abcd->bd", ginv, R)
    ricci = 0.5 * (ricci + ricci.T)
    rho = ginv @ ricci
    return CurvatureTensor(x, R, ricci, rho, float(np.trace(rho)), g)


@dataclass(frozen=True)
class OrthonormalFrame:
    """Columns of `E` are the coordinate components of E_1..E_4."""

    x: np.ndarray
    E: np.ndarray
    gram: np.ndarray

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.E)


def _frame_from_metric(g, orientation):
    L = np.linalg.cholesky(g)
    E = np.linalg.inv(L).T
    if np.sign(np.linalg.det(E)) * orientation < 0:
        E = E[:, [0, 1, 3, 2]]
    return E, L


def orthonormal_frame(chart: MetricChart, x) -> OrthonormalFrame:
    """Gram-Schmidt of the coordinate basis (in coordinate order), oriented.

    If the Gram-Schmidt frame has the wrong orientation, E_3 and E_4 are
    swapped.
    """
    x = chart.check_point(x)
    g = np.asarray(chart.g(x), dtype=float)
    _cholesky(g, chart, x)
    E, _ = _frame_from_metric(g, chart.orientation)
    return OrthonormalFrame(x, E, E.T @ g @ E)


def frame_derivative(chart: MetricChart, x) -> np.ndarray:
    """``dE[c]`` = partial_c of the frame field returned by `orthonormal_frame`."""
    g, dg, _ = metric_partials(chart, x)
    _cholesky(g, chart, x)
    L = np.linalg.cholesky(g)
    Linv = np.linalg.inv(L)
    E0 = Linv.T
    swap = np.sign(np.linalg.det(E0)) * chart.orientation < 0
    out = np.empty((DIM, DIM, DIM))
    for c in range(DIM):
        # derivative of the Cholesky factor: dL = L * Phi(L^-1 dg L^-T)
        M = Linv @ dg[c] @ Linv.T
        phi = np.tril(M)
        phi[np.diag_indices(DIM)] *= 0.5
        dL = L @ phi
        dE = -E0 @ dL.T @ E0
        out[c] = dE[:, [0, 1, 3, 2]] if swap else dE
    return out


def connection_matrices(chart: MetricChart, x) -> np.ndarray:
    """``w[c, a, b] = g(nabla_{d_c} E_a, E_b)`` for the frame of `orthonormal_frame`."""
    g, _, _ = metric_partials(chart, x)
    E = orthonormal_frame(chart, x).E
    dE = frame_derivative(chart, x)
    gam = christoffel(chart, x)
    # nabla_c E_a = dE[c][:, a] + Gamma^m_{c n} E_a^n
    nab = dE + np.einsum("mcn,na->cma", gam, E)
    return np.einsum("cma,mk,kb->cab", nab, g, E)
