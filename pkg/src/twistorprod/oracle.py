"""Coordinate model of (P, G_t) as an independent check of the closed forms.

Near a point kappa the bundle is parametrised by eight numbers: the four
chart coordinates x and, on each unit sphere of fibre coordinates y+- (split
components of sigma+- in the chart's frame field), the two components
orthogonal to the axis where |y| is largest. The metric G_t and the form
F(A, B) = G_t(K_nu A, B) are assembled as 8x8 matrix fields; Christoffel
symbols and covariant derivatives then come from central differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bivector import k_minus, k_plus
from .bundle import MetricParams, TwistorPoint, s_connection_forms, vertical_signs
from .chart import MetricChart, orthonormal_frame

STEP = 1e-4


@dataclass(frozen=True)
class SphereChart:
    """Orthographic chart of the unit 2-sphere around +- e_axis."""

    axis: int
    sign: float

    @property
    def others(self) -> list[int]:
        return [i for i in range(3) if i != self.axis]

    @classmethod
    def around(cls, y) -> "SphereChart":
        k = int(np.argmax(np.abs(y)))
        return cls(k, 1.0 if y[k] > 0 else -1.0)

    def chart(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float)[self.others]

    def point(self, u) -> np.ndarray:
        y = np.zeros(3)
        y[self.others] = u
        y[self.axis] = self.sign * np.sqrt(1.0 - float(np.dot(u, u)))
        return y

    def jacobian(self, u) -> np.ndarray:
        J = np.zeros((3, 2))
        J[self.others, [0, 1]] = 1.0
        J[self.axis] = -self.sign * np.asarray(u) / np.sqrt(1.0 - float(np.dot(u, u)))
        return J


class CoordinateModel:
    """G_t and F_{t,nu} as functions of the eight coordinates q = (x, u+, u-)."""

    def __init__(self, chart: MetricChart, nu: int, t: MetricParams, kappa: TwistorPoint, h: float = STEP):
        self.chart, self.nu, self.t, self.h = chart, nu, t, h
        self.sp = SphereChart.around(kappa.sigma_plus)
        self.sm = SphereChart.around(kappa.sigma_minus)
        self.q0 = np.concatenate([kappa.x, self.sp.chart(kappa.sigma_plus), self.sm.chart(kappa.sigma_minus)])
        self.hx = h * chart.scale

    def velocity_map(self, q) -> np.ndarray:
        """M (10 x 8): coordinate velocity -> frame tangent vector (X, c+, c-)."""
        x, up, um = q[:4], q[4:6], q[6:8]
        E = orthonormal_frame(self.chart, x).E
        omega = s_connection_forms(self.chart, x)
        y = np.concatenate([self.sp.point(up), self.sm.point(um)])
        M = np.zeros((10, 8))
        M[:4, :4] = np.linalg.inv(E)
        M[4:7, 4:6] = self.sp.jacobian(up)
        M[7:10, 6:8] = self.sm.jacobian(um)
        # covariant part of the fibre velocity: sum_j y_j omega[c, j, k]
        M[4:, :4] = np.einsum("j,cjk->kc", y, omega)
        return M

    def fields(self, q) -> tuple[np.ndarray, np.ndarray]:
        M = self.velocity_map(q)
        yp, ym = self.sp.point(q[4:6]), self.sm.point(q[6:8])
        ep, em = vertical_signs(self.nu)
        Kd = np.zeros((10, 10))
        Kd[:4, :4] = k_plus(yp) @ k_minus(ym)
        Kd[4:7, 4:7] = ep * np.eye(3)
        Kd[7:, 7:] = em * np.eye(3)
        W = np.diag(self.t.weights)
        return M.T @ W @ M, M.T @ W @ Kd @ M

    def _steps(self):
        return np.concatenate([self.hx, np.full(4, self.h)])

    def _central(self, k, hk):
        e = np.zeros(8)
        e[k] = hk
        Gp, Fp = self.fields(self.q0 + e)
        Gm, Fm = self.fields(self.q0 - e)
        return (Gp - Gm) / (2 * hk), (Fp - Fm) / (2 * hk)

    def derivatives(self):
        """(G, F, dG[k], dF[k]) at q0 by Richardson-extrapolated central differences."""
        G, F = self.fields(self.q0)
        dG = np.zeros((8, 8, 8))
        dF = np.zeros((8, 8, 8))
        for k, hk in enumerate(self._steps()):
            g1, f1 = self._central(k, hk)
            g2, f2 = self._central(k, 2 * hk)
            dG[k] = (4 * g1 - g2) / 3
            dF[k] = (4 * f1 - f2) / 3
        return G, F, dG, dF

    def christoffel(self, G=None, dG=None) -> np.ndarray:
        """gamma[l, k, i] = Gamma^l_{ki}."""
        if G is None:
            G, _, dG, _ = self.derivatives()
        lower = 0.5 * (np.einsum("kmi->mki", dG) + np.einsum("imk->mki", dG) - np.einsum("mki->mki", dG))
        return np.einsum("lm,mki->lki", np.linalg.inv(G), lower)

    def nabla_f(self) -> np.ndarray:
        """nabla F[k, i, j] = d_k F_ij - Gamma^l_ki F_lj - Gamma^l_kj F_il."""
        G, F, dG, dF = self.derivatives()
        gam = self.christoffel(G, dG)
        return dF - np.einsum("lki,lj->kij", gam, F) - np.einsum("lkj,il->kij", gam, F)

    def to_coordinates(self, A) -> np.ndarray:
        """Coordinate velocity of a frame tangent vector at q0."""
        M = self.velocity_map(self.q0)
        sol, *_ = np.linalg.lstsq(M, np.asarray(A, dtype=float), rcond=None)
        return sol


def numeric_df_oracle(chart: MetricChart, nu: int, t: MetricParams, kappa: TwistorPoint, A, B, C,
                      h: float = STEP) -> float:
    """(D_A F_{t,nu})(B, C) from the coordinate model; A, B, C as frame tangent vectors."""
    model = CoordinateModel(chart, nu, t, kappa, h)
    NF = model.nabla_f()
    a, b, c = (model.to_coordinates(v) for v in (A, B, C))
    return float(np.einsum("kij,k,i,j->", NF, a, b, c))


def oracle_tensor(chart: MetricChart, nu: int, t: MetricParams, kappa: TwistorPoint, h: float = STEP):
    """The covariant derivative of F and the coordinate converter, for many evaluations."""
    model = CoordinateModel(chart, nu, t, kappa, h)
    return model.nabla_f(), model.to_coordinates


def fibre_geodesic_defect(chart: MetricChart, t: MetricParams, kappa: TwistorPoint, h: float = STEP) -> float:
    """max |Gamma^{x}_{u u}|: the base part of D_{d_u} d_u' at kappa."""
    model = CoordinateModel(chart, 1, t, kappa, h)
    gam = model.christoffel()
    return float(np.abs(gam[:4, 4:, 4:]).max())
