"""Algebra of 2-vectors on an oriented Euclidean 4-space.

Every quantity is expressed in an oriented orthonormal frame E_1..E_4.
Bivectors are stored as 6-vectors in the split basis

    (s1+, s2+, s3+, s1-, s2-, s3-),
    s1 = E1^E2 +- E3^E4,  s2 = E1^E3 +- E4^E2,  s3 = E1^E4 +- E2^E3,

which is orthonormal for the induced metric g(v1^v2, v3^v4) = 1/2 det[g(vi, vj)].
The first three entries span the self-dual half and the last three the
anti-self-dual half. A bivector can also be written as the antisymmetric
matrix ``A = sum X Y^T - Y X^T``; then g(a, b) = tr(A^T B) / 4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import MetricChart, orthonormal_frame, riemann

WEDGE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PLUS = slice(0, 3)
MINUS = slice(3, 6)
HODGE = np.array([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])


def _unit_wedge(a, b):
    m = np.zeros((4, 4))
    m[a, b], m[b, a] = 1.0, -1.0
    return m


def _build_s_basis():
    w = {p: _unit_wedge(*p) for p in WEDGE_PAIRS}
    e12, e13, e14, e23, e24, e34 = (w[p] for p in WEDGE_PAIRS)
    e42 = -e24
    return np.stack([
        e12 + e34, e13 + e42, e14 + e23,
        e12 - e34, e13 - e42, e14 - e23,
    ])


S_BASIS = _build_s_basis()
# rows: wedge basis E_a^E_b (a < b) expressed in the s-basis
_WEDGE_TO_S = np.array([[0.25 * np.sum(S_BASIS[k] * _unit_wedge(*p)) for k in range(6)] for p in WEDGE_PAIRS])


def to_matrix(a) -> np.ndarray:
    return np.einsum("...k,kab->...ab", np.asarray(a, dtype=float), S_BASIS)


def from_matrix(A) -> np.ndarray:
    return 0.25 * np.einsum("kab,...ab->...k", S_BASIS, np.asarray(A, dtype=float))


def from_wedge_basis(w) -> np.ndarray:
    """Components on (E1^E2, E1^E3, E1^E4, E2^E3, E2^E4, E3^E4) -> s-basis."""
    return np.asarray(w, dtype=float) @ _WEDGE_TO_S


def to_wedge_basis(a) -> np.ndarray:
    # E_a^E_b has squared norm 1/2, so the inverse map is 2 * transpose
    return 2.0 * np.asarray(a, dtype=float) @ _WEDGE_TO_S.T


def wedge(X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    M = X[..., :, None] * Y[..., None, :]
    return from_matrix(M - np.swapaxes(M, -1, -2))


def inner(a, b) -> np.ndarray:
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def metric_lambda2_det(v1, v2, v3, v4) -> float:
    """The induced metric from its definition, g(v1^v2, v3^v4) = det/2."""
    gram = np.array([[np.dot(v1, v3), np.dot(v1, v4)], [np.dot(v2, v3), np.dot(v2, v4)]])
    return 0.5 * float(np.linalg.det(gram))


@dataclass(frozen=True)
class Bivector:
    """A bivector at base point `x`, components in the split s-basis."""

    x: tuple
    comps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "comps", np.asarray(self.comps, dtype=float).reshape(6))

    @property
    def plus(self) -> np.ndarray:
        return self.comps[PLUS]

    @property
    def minus(self) -> np.ndarray:
        return self.comps[MINUS]


def metric_lambda2(a: Bivector, b: Bivector) -> float:
    if a.x != b.x:
        raise ValueError("bivectors live over different base points")
    return float(inner(a.comps, b.comps))


def hodge_star(a) -> np.ndarray:
    return np.asarray(a, dtype=float) * HODGE


def sd_split(a) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    plus = a.copy()
    minus = a.copy()
    plus[..., MINUS] = 0.0
    minus[..., PLUS] = 0.0
    return plus, minus


def embed(plus=None, minus=None) -> np.ndarray:
    """Assemble a 6-vector from optional halves."""
    parts = [np.asarray(p, dtype=float) for p in (plus, minus) if p is not None]
    shape = parts[0].shape[:-1] if parts else ()
    out = np.zeros(shape + (6,))
    if plus is not None:
        out[..., PLUS] = plus
    if minus is not None:
        out[..., MINUS] = minus
    return out


def k_endo(a) -> np.ndarray:
    """Skew endomorphism K_a with g(K_a X, Y) = 2 g(a, X^Y)."""
    return -to_matrix(a)


def k_plus(b) -> np.ndarray:
    return k_endo(embed(plus=b))


def k_minus(b) -> np.ndarray:
    return k_endo(embed(minus=b))


def cross(b, c) -> np.ndarray:
    """Cross product inside one half, on 3-component vectors.

    The orientation of each half is the one making (s1, s2, s3) positive.
    """
    return np.cross(np.asarray(b, dtype=float), np.asarray(c, dtype=float))


def cross6(b, c) -> np.ndarray:
    """Cross product of two 6-vectors lying in the same half."""
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    bp, bm = np.abs(b[..., PLUS]).max(), np.abs(b[..., MINUS]).max()
    cp, cm = np.abs(c[..., PLUS]).max(), np.abs(c[..., MINUS]).max()
    if (bp > 0 and bm > 0) or (cp > 0 and cm > 0) or (bp > 0 and cm > 0) or (bm > 0 and cp > 0):
        raise ValueError("cross product needs both arguments in the same half")
    return embed(cross(b[..., PLUS], c[..., PLUS]), cross(b[..., MINUS], c[..., MINUS]))


def gamma_metric(P, Q) -> float:
    """The metric -tr(PQ)/2 on skew endomorphisms."""
    return -0.5 * float(np.trace(P @ Q))


def curvature_operator_from_riemann(R_frame) -> np.ndarray:
    """6x6 matrix ``Rop[i, j] = g(R(s_i), s_j)`` from frame components R_abcd."""
    return 0.25 * np.einsum("iab,jcd,abcd->ij", S_BASIS, S_BASIS, R_frame)


def curvature_endo(Rop, a) -> np.ndarray:
    """R(a) as an endomorphism of the tangent space: R(a) = K_{Rop a} / 2."""
    return 0.5 * k_endo(np.asarray(a) @ Rop.T)


def act_on_bivector(L, b) -> np.ndarray:
    """Derivation action of a skew endomorphism L on a bivector."""
    B = to_matrix(b)
    return from_matrix(L @ B - B @ L)


@dataclass(frozen=True)
class CurvatureDecomposition:
    """Blocks of Rop = s/6 Id + B + W+ + W- in the s-basis."""

    scalar: float
    B: np.ndarray
    W_plus: np.ndarray
    W_minus: np.ndarray
    R: np.ndarray

    @property
    def W(self) -> np.ndarray:
        out = np.zeros((6, 6))
        out[PLUS, PLUS] = self.W_plus
        out[MINUS, MINUS] = self.W_minus
        return out

    def reconstruction_residual(self) -> float:
        return float(np.abs(self.R - (self.scalar / 6 * np.eye(6) + self.B + self.W)).max())

    def norms(self) -> dict[str, float]:
        return {
            "B": float(np.linalg.norm(self.B)),
            "W_plus": float(np.linalg.norm(self.W_plus)),
            "W_minus": float(np.linalg.norm(self.W_minus)),
        }


def traceless_ricci_operator(rho, s) -> np.ndarray:
    """Matrix of B(X^Y) = rho X ^ Y + X ^ rho Y - s/2 X^Y in the s-basis."""
    S = S_BASIS
    images = np.einsum("ab,kbc->kac", rho, S) + np.einsum("kab,bc->kac", S, rho) - 0.5 * s * S
    return from_matrix(images).T


def decompose(Rop, rho, s) -> CurvatureDecomposition:
    B = traceless_ricci_operator(rho, s)
    W = Rop - s / 6 * np.eye(6) - B
    return CurvatureDecomposition(float(s), B, W[PLUS, PLUS].copy(), W[MINUS, MINUS].copy(), np.array(Rop))


@dataclass(frozen=True)
class PointGeometry:
    """Everything the closed forms need at one base point, in frame components."""

    chart: MetricChart
    x: np.ndarray
    E: np.ndarray
    R_frame: np.ndarray
    Rop: np.ndarray
    rho: np.ndarray
    scalar: float
    decomposition: CurvatureDecomposition


def point_geometry(chart: MetricChart, x) -> PointGeometry:
    x = chart.check_point(x)
    curv = riemann(chart, x)
    E = orthonormal_frame(chart, x).E
    R_frame = np.einsum("abcd,ai,bj,ck,dl->ijkl", curv.R, E, E, E, E)
    Rop = curvature_operator_from_riemann(R_frame)
    Rop = 0.5 * (Rop + Rop.T)
    # rho in frame components: E^-1 rho E
    rho = np.linalg.solve(E, curv.rho @ E)
    rho = 0.5 * (rho + rho.T)
    dec = decompose(Rop, rho, curv.scalar)
    return PointGeometry(chart, x, E, R_frame, Rop, rho, curv.scalar, dec)


def curvature_operator(chart: MetricChart, x) -> np.ndarray:
    return point_geometry(chart, x).Rop
