"""Points and tangent vectors of the product twistor bundle Z+ x Z-.

A point is a pair of unit bivectors (sigma+, sigma-) over a base point,
given by their components in the s-basis of the chart frame there. A
tangent vector at that point is a 10-vector

    [X (4 frame components), V+ (3), V- (3)]

whose first block is the horizontal part (the lift of X) and whose last two
blocks are the vertical part, with V+- orthogonal to sigma+-.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bivector import PointGeometry, k_minus, k_plus, point_geometry, to_matrix, embed
from .chart import MetricChart, connection_matrices
from .bivector import S_BASIS

H = slice(0, 4)
VP = slice(4, 7)
VM = slice(7, 10)
EPSILON = {1: 1, 2: 1, 3: -1, 4: -1}


def vertical_signs(nu: int) -> tuple[int, int]:
    """Action of K_nu on the (V+, V-) blocks of a vertical vector."""
    if nu not in EPSILON:
        raise ValueError(f"nu must be 1..4, got {nu}")
    eps = EPSILON[nu]
    return eps, eps * (-1) ** (nu + 1)


@dataclass(frozen=True)
class MetricParams:
    t1: float
    t2: float

    def __post_init__(self):
        if not (self.t1 > 0 and self.t2 > 0):
            raise ValueError(f"metric parameters must be positive, got ({self.t1}, {self.t2})")

    @property
    def weights(self) -> np.ndarray:
        return np.array([1.0] * 4 + [self.t1] * 3 + [self.t2] * 3)

    def scaled(self, factor: float) -> "MetricParams":
        return MetricParams(self.t1 * factor, self.t2 * factor)


@dataclass(frozen=True)
class TwistorPoint:
    geo: PointGeometry
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray

    def __post_init__(self):
        for name in ("sigma_plus", "sigma_minus"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-10:
                raise ValueError(f"{name} must be a unit 3-vector")
            object.__setattr__(self, name, v)

    @classmethod
    def at(cls, chart: MetricChart, x, sigma_plus, sigma_minus, normalize: bool = True):
        sp_ = np.asarray(sigma_plus, dtype=float)
        sm_ = np.asarray(sigma_minus, dtype=float)
        if normalize:
            sp_, sm_ = sp_ / np.linalg.norm(sp_), sm_ / np.linalg.norm(sm_)
        return cls(point_geometry(chart, x), sp_, sm_)

    @property
    def x(self) -> np.ndarray:
        return self.geo.x

    @property
    def sigma(self) -> np.ndarray:
        return embed(self.sigma_plus, self.sigma_minus)

    @property
    def K_plus(self) -> np.ndarray:
        return k_plus(self.sigma_plus)

    @property
    def K_minus(self) -> np.ndarray:
        return k_minus(self.sigma_minus)

    @cached_property
    def unit_basis(self) -> np.ndarray:
        """The tangent basis of `tangent_basis` at t = (1, 1)."""
        out = np.zeros((8, 10))
        out[:4, H] = adapted_frame(self).Q.T
        out[4:6, VP] = vertical_basis(self.sigma_plus)
        out[6:8, VM] = vertical_basis(self.sigma_minus)
        out.flags.writeable = False
        return out

    def flipped(self, plus: bool = False, minus: bool = False) -> "TwistorPoint":
        return TwistorPoint(
            self.geo,
            -self.sigma_plus if plus else self.sigma_plus,
            -self.sigma_minus if minus else self.sigma_minus,
        )


def tangent(X=None, U_plus=None, U_minus=None) -> np.ndarray:
    out = np.zeros(10)
    if X is not None:
        out[H] = X
    if U_plus is not None:
        out[VP] = U_plus
    if U_minus is not None:
        out[VM] = U_minus
    return out


def p_kappa(kappa: TwistorPoint) -> np.ndarray:
    """P = K_{sigma+} K_{sigma-} in frame components."""
    return kappa.K_plus @ kappa.K_minus


def vertical_projection(kappa: TwistorPoint, a) -> np.ndarray:
    """Project a 6-vector (a+, a-) onto the vertical space at kappa."""
    a = np.asarray(a, dtype=float)
    ap, am = a[..., :3], a[..., 3:]
    sp_, sm_ = kappa.sigma_plus, kappa.sigma_minus
    ap = ap - (ap @ sp_)[..., None] * sp_
    am = am - (am @ sm_)[..., None] * sm_
    return np.concatenate([ap, am], axis=-1)


def project_tangent(kappa: TwistorPoint, A) -> np.ndarray:
    A = np.array(A, dtype=float)
    A[..., 4:] = vertical_projection(kappa, A[..., 4:])
    return A


def vertical_basis(sigma) -> np.ndarray:
    """Two orthonormal vectors spanning the orthogonal complement of a unit 3-vector."""
    sigma = np.asarray(sigma, dtype=float)
    u, _, _ = np.linalg.svd(np.eye(3) - np.outer(sigma, sigma))
    b1 = u[:, 0] - (u[:, 0] @ sigma) * sigma
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(sigma, b1)
    return np.stack([b1, b2])


def k_nu_matrix(nu: int, kappa: TwistorPoint) -> np.ndarray:
    ep, em = vertical_signs(nu)
    K = np.zeros((10, 10))
    K[H, H] = p_kappa(kappa)
    K[VP, VP] = ep * np.eye(3)
    K[VM, VM] = em * np.eye(3)
    return K


def k_nu(nu: int, kappa: TwistorPoint, A) -> np.ndarray:
    return np.asarray(A, dtype=float) @ k_nu_matrix(nu, kappa).T


def g_t(t: MetricParams, A, B) -> np.ndarray:
    return np.sum(np.asarray(A) * t.weights * np.asarray(B), axis=-1)


@dataclass(frozen=True)
class AdaptedFrame:
    """Oriented orthonormal basis with sigma+- = E1^E2 +- E3^E4.

    Columns of `Q` are E_1..E_4 in components of the chart frame.
    """

    Q: np.ndarray

    def residual(self, kappa: TwistorPoint) -> float:
        from .bivector import wedge

        Q = self.Q
        e12, e34 = wedge(Q[:, 0], Q[:, 1]), wedge(Q[:, 2], Q[:, 3])
        plus = e12 + e34 - embed(plus=kappa.sigma_plus)
        minus = e12 - e34 - embed(minus=kappa.sigma_minus)
        return float(max(np.abs(plus).max(), np.abs(minus).max()))


def _pick_max_first(basis: np.ndarray) -> np.ndarray:
    """Unit vector in span(columns) maximising the first component, ties by the second."""
    for axis in range(4):
        e = np.zeros(4)
        e[axis] = 1.0
        v = basis @ (basis.T @ e)
        if np.linalg.norm(v) > 1e-8:
            return v / np.linalg.norm(v)
    raise AssertionError("empty eigenspace")


def adapted_frame(kappa: TwistorPoint) -> AdaptedFrame:
    P = p_kappa(kappa)
    P = 0.5 * (P + P.T)
    w, vecs = np.linalg.eigh(P)
    neg, pos = vecs[:, w < 0], vecs[:, w > 0]
    if neg.shape[1] != 2 or pos.shape[1] != 2:
        raise AssertionError(f"P has eigenvalues {w}")
    Kp = kappa.K_plus
    e1 = _pick_max_first(neg)
    e2 = Kp @ e1
    e3 = _pick_max_first(pos)
    e4 = Kp @ e3
    Q = np.column_stack([e1, e2, e3, e4])
    if np.linalg.det(Q) < 0:
        Q[:, 2] *= -1
        Q[:, 3] *= -1
    return AdaptedFrame(Q)


def adapted_point(chart: MetricChart, x, i_plus: int = 0, i_minus: int = 0) -> TwistorPoint:
    """kappa = (s_{i+}^+, s_{i-}^-) built from the chart frame."""
    sp_ = np.zeros(3)
    sm_ = np.zeros(3)
    sp_[i_plus] = 1.0
    sm_[i_minus] = 1.0
    return TwistorPoint.at(chart, x, sp_, sm_)


def random_kappa(chart: MetricChart, x, rng: np.random.Generator) -> TwistorPoint:
    """Uniform point of S^2 x S^2 over x."""
    return TwistorPoint.at(chart, x, rng.normal(size=3), rng.normal(size=3))


def random_vertical(kappa: TwistorPoint, rng: np.random.Generator) -> np.ndarray:
    return vertical_projection(kappa, rng.normal(size=6))


def random_tangent(kappa: TwistorPoint, rng: np.random.Generator, part: str = "both") -> np.ndarray:
    A = np.zeros(10)
    if part in ("h", "both"):
        A[H] = rng.normal(size=4)
    if part in ("v", "both"):
        A[4:] = random_vertical(kappa, rng)
    return A


def coordinates_on_P(kappa: TwistorPoint) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, y+, y-) with y+-_j = g(sigma+-, s_j+-) in the chart's frame field."""
    return kappa.x.copy(), kappa.sigma_plus.copy(), kappa.sigma_minus.copy()


def point_from_coordinates(chart: MetricChart, x, y_plus, y_minus) -> TwistorPoint:
    y_plus = np.asarray(y_plus, dtype=float)
    y_minus = np.asarray(y_minus, dtype=float)
    for y in (y_plus, y_minus):
        if abs(np.linalg.norm(y) - 1) > 1e-8:
            raise ValueError("fibre coordinates must lie on the unit sphere")
    return TwistorPoint.at(chart, x, y_plus, y_minus)


def s_connection_forms(chart: MetricChart, x) -> np.ndarray:
    """``omega[c, j, k] = g(nabla_{d_c} s_j, s_k)`` for the 6 split-basis sections.

    The matrix is block diagonal because the connection preserves both halves.
    """
    w = connection_matrices(chart, x)  # w[c, a, b] = g(nabla_c E_a, E_b)
    # nabla_c of sum M_ab E_a (x) E_b has frame matrix w^T M + M w
    nab = np.einsum("cba,jbd->cjad", w, S_BASIS) + np.einsum("jab,cbd->cjad", S_BASIS, w)
    return 0.25 * np.einsum("cjab,kab->cjk", nab, S_BASIS)


def horizontal_lift(chart: MetricChart, x, y_plus, y_minus, X) -> np.ndarray:
    """Components of X^h in the coordinates (x, y+, y-) of R^4 x R^3 x R^3.

    `X` is given in coordinate components on the base.
    """
    omega = s_connection_forms(chart, x)
    wX = np.einsum("c,cjk->jk", np.asarray(X, dtype=float), omega)
    y = np.concatenate([y_plus, y_minus])
    return np.concatenate([np.asarray(X, dtype=float), -y @ wX])


def vertical_field(y_plus, y_minus, a) -> np.ndarray:
    """The vertical field a~ at fibre coordinates y for a section with s-components a."""
    a = np.asarray(a, dtype=float)
    ap = a[:3] - np.dot(y_plus, a[:3]) * np.asarray(y_plus)
    am = a[3:] - np.dot(y_minus, a[3:]) * np.asarray(y_minus)
    return np.concatenate([np.zeros(4), ap, am])


def frame_to_coords(kappa: TwistorPoint, X_frame) -> np.ndarray:
    return kappa.geo.E @ np.asarray(X_frame, dtype=float)


def coords_to_frame(kappa: TwistorPoint, X_coord) -> np.ndarray:
    return np.linalg.solve(kappa.geo.E, np.asarray(X_coord, dtype=float))


def eigenspace_dims(nu: int, kappa: TwistorPoint) -> tuple[int, int]:
    """(+1, -1) eigenspace dimensions of K_nu on the 8-dimensional tangent space."""
    basis = tangent_basis(kappa, MetricParams(1.0, 1.0))
    K = k_nu_matrix(nu, kappa)
    M = basis @ K @ basis.T  # restricted operator in an orthonormal basis
    w = np.linalg.eigvalsh(0.5 * (M + M.T))
    return int(np.sum(w > 0.5)), int(np.sum(w < -0.5))


def tangent_basis(kappa: TwistorPoint, t: MetricParams) -> np.ndarray:
    """Rows: a G_t-orthonormal basis of the tangent space adapted to P and K_nu.

    Order: E1^h, E2^h (P = -1), E3^h, E4^h (P = +1), then the two unit
    vectors orthogonal to sigma+ scaled by 1/sqrt(t1), then the same for sigma-.
    """
    out = kappa.unit_basis.copy()
    out[4:6] /= np.sqrt(t.t1)
    out[6:8] /= np.sqrt(t.t2)
    return out


def distribution_basis(nu: int, kappa: TwistorPoint, t: MetricParams, perp: bool = False) -> np.ndarray:
    """G_t-orthonormal basis (rows) of D_nu (K_nu = +1) or of its complement."""
    ep, em = vertical_signs(nu)
    sign = -1 if perp else 1
    basis = tangent_basis(kappa, t)
    rows = [2, 3] if not perp else [0, 1]
    if ep == sign:
        rows += [4, 5]
    if em == sign:
        rows += [6, 7]
    return basis[rows]
