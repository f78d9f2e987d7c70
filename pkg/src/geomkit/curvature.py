"""Riemann, Ricci, scalar and sectional curvature; flatness and Jacobi fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import GeodesicSolution, _gamma, geodesic_ivp, sample_linear_transport
from .errors import ConvergenceError, DegenerateError, DomainError, GeometryError
from .metric import ChartMetric, metric_at, require_domain

__all__ = [
    "CurvatureReport",
    "riemann_at",
    "riemann_batch",
    "sectional",
    "flatness_check",
    "JacobiField",
    "jacobi_deviation",
    "jacobi_family_error",
]

GAMMA_STEP = 1e-4


def _gamma_derivative(M: ChartMetric, X, h=GAMMA_STEP):
    """``dG[n, k, i, a, b] = d/dx_k Gamma^i_ab`` by the fourth-order central stencil."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    E = np.eye(d) * h
    # stencil points: X + s*h*e_k for s in (-2, -1, 1, 2)
    offs = np.array([-2.0, -1.0, 1.0, 2.0])
    pts = X[:, None, None, :] + offs[None, :, None, None] * E[None, None, :, :]
    if not np.all(M.contains(pts)):
        raise DomainError("curvature stencil leaves the chart domain")
    G = _gamma(M, pts.reshape(-1, d)).reshape(n, 4, d, d, d, d)
    return (G[:, 0] - 8.0 * G[:, 1] + 8.0 * G[:, 2] - G[:, 3]) / (12.0 * h)


def riemann_batch(M: ChartMetric, X):
    """``R^i_jkl`` at each row of ``X`` (shape ``(n, d)``); returns ``(n, d, d, d, d)``.

    R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_ka Gamma^a_lj - Gamma^i_la Gamma^a_kj,
    so that R(d_k, d_l) d_j = R^i_jkl d_i.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    G = _gamma(M, X)
    dG = _gamma_derivative(M, X)
    # dG[n,k,i,l,j] -> term1[n,i,j,k,l]
    term1 = np.einsum("nkilj->nijkl", dG)
    GG = np.einsum("nika,nalj->nijkl", G, G)
    R = term1 - np.swapaxes(term1, -1, -2) + GG - np.swapaxes(GG, -1, -2)
    return R


@dataclass(frozen=True)
class CurvatureReport:
    """Curvature data at one chart point.

    Attributes
    ----------
    riemann : ndarray, shape (d, d, d, d)
        ``riemann[i, j, k, l] = R^i_jkl``.
    riemann_lowered : ndarray
        ``R_ijkl = g_im R^m_jkl``.
    ricci : ndarray, shape (d, d)
        ``R_ij = sum_k R^k_ikj``.
    scalar : float
        ``g^ij R_ij``; equals ``2K`` on a surface.
    """

    point: np.ndarray
    riemann: np.ndarray
    riemann_lowered: np.ndarray
    ricci: np.ndarray
    scalar: float

    def gaussian_curvature(self, g=None) -> float:
        """``R_1212 / det g`` for two-dimensional charts."""
        if self.riemann.shape[0] != 2:
            raise GeometryError("gaussian curvature is defined for surfaces only")
        if g is None:
            g = self._g
        return float(self.riemann_lowered[0, 1, 0, 1] / np.linalg.det(g))

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "riemann": self.riemann.tolist(),
            "riemann_lowered": self.riemann_lowered.tolist(),
            "ricci": self.ricci.tolist(),
            "scalar": float(self.scalar),
        }


def riemann_at(M: ChartMetric, x) -> CurvatureReport:
    """Full curvature report at ``x``.

    Derivatives of the Christoffel symbols use central differences with step
    ``1e-4``; the Christoffel symbols themselves use the analytic metric
    derivative when the chart provides one.

    Raises
    ------
    DomainError
        If ``x`` or the difference stencil leaves the domain.
    """
    g = metric_at(M, x)
    x = np.asarray(x, dtype=float)
    R = riemann_batch(M, x[None])[0]
    lowered = np.einsum("im,mjkl->ijkl", g, R)
    ricci = np.einsum("kikj->ij", R)
    scalar = float(np.sum(np.linalg.inv(g) * ricci))
    rep = CurvatureReport(point=x.copy(), riemann=R, riemann_lowered=lowered, ricci=ricci, scalar=scalar)
    object.__setattr__(rep, "_g", g)
    return rep


def sectional(M: ChartMetric, x, xi, eta) -> float:
    """Sectional curvature of the plane spanned by ``xi`` and ``eta`` at ``x``.

    ``K = <R(xi, eta) eta, xi> / (|xi|^2 |eta|^2 - <xi, eta>^2)`` with the
    un-rooted Gram determinant in the denominator.

    Raises
    ------
    DegenerateError
        If the Gram determinant is below ``1e-14``.
    """
    g = metric_at(M, x)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    gram = (xi @ g @ xi) * (eta @ g @ eta) - (xi @ g @ eta) ** 2
    if not gram >= 1e-14:
        raise DegenerateError("vectors do not span a plane")
    R = riemann_batch(M, np.asarray(x, float)[None])[0]
    lowered = np.einsum("im,mjkl->ijkl", g, R)
    num = np.einsum("ijkl,i,j,k,l->", lowered, xi, eta, xi, eta)
    return float(num / gram)


def flatness_check(M: ChartMetric, sample_points, tol=1e-6):
    """Whether ``R^i_jkl`` vanishes (below ``tol``) at every sample point.

    Returns
    -------
    (flat, max_residual)
    """
    X = np.asarray(sample_points, dtype=float)
    if X.size == 0:
        raise GeometryError("flatness_check needs at least one sample point")
    X = X.reshape(-1, M.dim)
    require_domain(M, X, "sample point")
    worst = float(np.max(np.abs(riemann_batch(M, X))))
    return worst < tol, worst


# -- Jacobi fields ---------------------------------------------------------------


@dataclass
class JacobiField:
    """Jacobi field sampled along a geodesic: ``J`` and its covariant derivative ``DJ``."""

    t: np.ndarray
    x: np.ndarray
    J: np.ndarray
    DJ: np.ndarray

    def norms(self, M: ChartMetric) -> np.ndarray:
        g = M.metric(self.x)
        return np.sqrt(np.einsum("ni,nij,nj->n", self.J, g, self.J))


def _jacobi_matrices(M, x, v):
    d = x.shape[1]
    G = _gamma(M, x)
    Gv = np.einsum("nijk,nj->nik", G, v)  # (Gamma(v, .))^i_k
    R = riemann_batch(M, x)
    Rv = np.einsum("nijkl,nj,nl->nik", R, v, v)  # (R(., v) v)^i_k
    A = np.zeros((len(x), 2 * d, 2 * d))
    A[:, :d, :d] = -Gv
    A[:, :d, d:] = np.eye(d)
    A[:, d:, :d] = -Rv
    A[:, d:, d:] = -Gv
    return A


def jacobi_deviation(M: ChartMetric, geo: GeodesicSolution, J0, J0dot) -> JacobiField:
    """Integrate ``D^2 J/dt^2 + R(J, c') c' = 0`` along a sampled geodesic.

    ``J0dot`` is the covariant derivative ``DJ/dt`` at ``t = 0``.  The state
    ``(J, DJ)`` obeys a linear system whose coefficients are evaluated at the
    geodesic samples; RK4 steps span two sample intervals, so every other
    sample of ``geo`` appears in the output.
    """
    J0 = np.asarray(J0, dtype=float)
    J0dot = np.asarray(J0dot, dtype=float)
    if not (np.all(np.isfinite(J0)) and np.all(np.isfinite(J0dot))):
        raise GeometryError("initial Jacobi data must be finite")
    n = len(geo.t) - 1
    if n < 2:
        raise GeometryError("geodesic has too few samples")
    n -= n % 2
    x, v = geo.x[: n + 1], geo.v[: n + 1]
    A = _jacobi_matrices(M, x, v)
    H = 2.0 * (geo.t[1] - geo.t[0])
    Y = sample_linear_transport(A, np.concatenate([J0, J0dot]), H)
    if not np.all(np.isfinite(Y)):
        raise ConvergenceError("Jacobi integration failed")
    d = M.dim
    return JacobiField(t=geo.t[: n + 1 : 2], x=x[::2], J=Y[:, :d], DJ=Y[:, d:])


def jacobi_family_error(M: ChartMetric, geo: GeodesicSolution, field: JacobiField, eps=1e-5) -> float:
    """Sup-norm gap between ``field.J`` and ``dx/ds`` of a geodesic family.

    The family starts at ``p + s J0`` with velocity ``xi + s (J0dot - Gamma(xi, J0))``,
    which has variation field ``J0`` and covariant derivative ``J0dot`` at ``t = 0``.
    ``dx/ds`` is taken by a central difference in ``s``.
    """
    p, xi = geo.x[0], geo.v[0]
    J0, J0dot = field.J[0], field.DJ[0]
    G = _gamma(M, p)
    dv = J0dot - np.einsum("ijk,j,k->i", G, xi, J0)
    T = geo.t[-1]
    plus = geodesic_ivp(M, p + eps * J0, xi + eps * dv, T, step=geo.step, max_halvings=0)
    minus = geodesic_ivp(M, p - eps * J0, xi - eps * dv, T, step=geo.step, max_halvings=0)
    m = min(len(plus.x), len(minus.x), len(geo.x))
    m -= (m - 1) % 2
    fd = (plus.x[:m:2] - minus.x[:m:2]) / (2 * eps)
    k = len(fd)
    return float(np.max(np.abs(fd - field.J[:k])))
