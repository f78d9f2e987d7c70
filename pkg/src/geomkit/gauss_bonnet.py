"""Local and global Gauss-Bonnet checks: geodesic triangles, holonomy, total curvature."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .connection import _rk4_geodesic, geodesic_bvp, transport_frame
from .curvature import riemann_batch
from .errors import ConvergenceError, DegenerateError, DomainError, GeometryError
from .metric import ChartMetric, inner_product, require_domain
from .models import TriangleData
from .surfaces import ParametricSurface, _forms

__all__ = [
    "GeodesicTriangle",
    "TriangleReport",
    "build_triangle",
    "triangle_report",
    "triangle_integral",
    "triangle_holonomy",
    "total_curvature_closed",
    "euler_characteristic",
]

SIDE_POINTS = 128
CELL_TOL = 1e-7
MAX_CELLS = 2 ** 16

# Dunavant degree-5 rule: (barycentric coordinates, weight)
_D5_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [0.059715871789770, 0.470142064105115, 0.470142064105115],
    [0.470142064105115, 0.059715871789770, 0.470142064105115],
    [0.470142064105115, 0.470142064105115, 0.059715871789770],
    [0.797426985353087, 0.101286507323456, 0.101286507323456],
    [0.101286507323456, 0.797426985353087, 0.101286507323456],
    [0.101286507323456, 0.101286507323456, 0.797426985353087],
])
_D5_W = np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3)


@dataclass
class GeodesicTriangle:
    """Three vertices joined by geodesic sides.

    ``sides[i]`` runs from ``vertices[i]`` to ``vertices[(i + 1) % 3]``;
    ``angles[i]`` is the interior angle at ``vertices[i]``.
    """

    vertices: np.ndarray
    sides: list
    angles: np.ndarray
    lengths: np.ndarray

    @property
    def excess(self) -> float:
        return float(np.sum(self.angles) - math.pi)

    def data(self, R=1.0) -> TriangleData:
        """Side lengths opposite each angle, as :class:`TriangleData`."""
        A, B, C = self.angles
        # side i joins vertex i to vertex i+1, so it is opposite vertex i+2
        return TriangleData(a=self.lengths[1], b=self.lengths[2], c=self.lengths[0], A=A, B=B, C=C, R=R)


def build_triangle(M: ChartMetric, p, q, r, n_final=256) -> GeodesicTriangle:
    """Geodesic triangle with vertices ``p, q, r`` (sides by ``geodesic_bvp``).

    Angles come from the metric inner product of the outgoing side
    velocities at each vertex.

    Raises
    ------
    DegenerateError
        If two vertices coincide or an angle is within ``1e-8`` of 0 or pi.
    """
    V = np.array([p, q, r], dtype=float)
    require_domain(M, V, "vertex")
    for i in range(3):
        if np.allclose(V[i], V[(i + 1) % 3], rtol=0, atol=1e-12):
            raise DegenerateError("triangle has coincident vertices")
    sides, lengths = [], []
    for i in range(3):
        sol, dist = geodesic_bvp(M, V[i], V[(i + 1) % 3], n_final=n_final)
        sides.append(sol)
        lengths.append(dist)
    angles = np.empty(3)
    for i in range(3):
        out = sides[i].v[0]
        back = -sides[(i - 1) % 3].v[-1]
        _, ang = inner_product(M, V[i], out, back)
        angles[i] = ang
    if np.any(angles < 1e-8) or np.any(angles > math.pi - 1e-8):
        raise DegenerateError("triangle vertices are (nearly) collinear")
    return GeodesicTriangle(vertices=V, sides=sides, angles=angles, lengths=np.array(lengths))


# -- curvature integral: two-dimensional charts ---------------------------------------


def _gauss_density(M, X):
    """``K sqrt(det g)`` and ``sqrt(det g)`` at chart points ``X`` of a 2-d chart."""
    g = M.metric(X)
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    R = riemann_batch(M, X)
    low = np.einsum("nm,nm->n", g[:, 0, :], R[:, :, 1, 0, 1])  # R_1212
    rt = np.sqrt(det)
    return low / rt, rt


def _rule(M, tri):
    """Degree-5 estimates of the curvature and area integrals on triangles ``(n, 3, 2)``."""
    pts = np.einsum("qk,nkd->nqd", _D5_BARY, tri)
    e1 = tri[:, 1] - tri[:, 0]
    e2 = tri[:, 2] - tri[:, 0]
    jac = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    kd, ad = _gauss_density(M, pts.reshape(-1, 2))
    kd = kd.reshape(-1, 7) @ _D5_W
    ad = ad.reshape(-1, 7) @ _D5_W
    return kd * jac, ad * jac


def _split(tri):
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    kids = np.stack([
        np.stack([a, ab, ca], 1),
        np.stack([ab, b, bc], 1),
        np.stack([ca, bc, c], 1),
        np.stack([ab, bc, ca], 1),
    ], 1)
    return kids.reshape(-1, 3, 2)


def _boundary_polygon(T: GeodesicTriangle, per_side=SIDE_POINTS):
    """Polygon through ``per_side`` points of each side, plus sliver data.

    A sliver is the region between a polygon edge and the side arc it cuts
    off.  Returns ``(poly, sliver_area, sliver_point)`` with signed sliver
    areas (same orientation as the polygon) and a representative point two
    fifths of the way from the chord midpoint to the arc midpoint.
    """
    xg, wg = np.polynomial.legendre.leggauss(3)
    pts, areas, reps = [], [], []
    for side in T.sides:
        c = side.as_curve()
        t = np.linspace(c.t0, c.t1, per_side + 1)
        P = c.point(t)
        dt = np.diff(t)
        tq = t[:-1, None] + 0.5 * dt[:, None] * (xg + 1.0)
        X = c.point(tq.ravel()).reshape(per_side, 3, 2)
        Vq = c.velocity(tq.ravel()).reshape(per_side, 3, 2)
        arc = 0.5 * dt * ((X[..., 0] * Vq[..., 1] - X[..., 1] * Vq[..., 0]) @ wg)
        chord = P[1:, 0] * P[:-1, 1] - P[1:, 1] * P[:-1, 0]
        areas.append(0.5 * arc + 0.5 * chord)
        mid_arc = c.point(t[:-1] + 0.5 * dt)
        mid_chord = 0.5 * (P[1:] + P[:-1])
        reps.append(mid_chord + 0.4 * (mid_arc - mid_chord))
        pts.append(P[:-1])
    return np.vstack(pts), np.concatenate(areas), np.vstack(reps)


def _check_enclosed(T: GeodesicTriangle, poly):
    """The chart region bounded by the sides must turn the same way at every corner.

    A reflex corner means the bounded chart region is the complement of the
    geodesic triangle (its interior contains a point the chart sends to
    infinity), so the chart quadrature would integrate the wrong region.
    """
    x, y = poly[:, 0], poly[:, 1]
    orient = np.sign(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    for i in range(3):
        a, b = T.sides[i - 1].v[-1], T.sides[i].v[0]
        if np.sign(a[0] * b[1] - a[1] * b[0]) != orient:
            raise DomainError("triangle interior is not contained in the chart (reflex corner in chart coordinates)")


def _integral_2d(M, T: GeodesicTriangle, tol=CELL_TOL, max_cells=MAX_CELLS):
    poly, sliver_area, sliver_pt = _boundary_polygon(T)
    _check_enclosed(T, poly)
    center = poly.mean(axis=0)
    tri = np.stack([np.broadcast_to(center, poly.shape), poly, np.roll(poly, -1, axis=0)], 1)
    if not np.all(M.contains(tri.reshape(-1, 2))):
        raise GeometryError("triangle fan leaves the chart domain")
    k_est, a_est = _rule(M, tri)
    total_k, total_a = 0.0, 0.0
    n_cells = len(tri)
    while len(tri):
        kids = _split(tri)
        kk, ka = _rule(M, kids)
        kk4 = kk.reshape(-1, 4).sum(1)
        ka4 = ka.reshape(-1, 4).sum(1)
        done = (np.abs(kk4 - k_est) <= tol) & (np.abs(ka4 - a_est) <= tol)
        total_k += float(np.sum(kk4[done]))
        total_a += float(np.sum(ka4[done]))
        keep = np.repeat(~done, 4)
        tri, k_est, a_est = kids[keep], kk[keep], ka[keep]
        n_cells += 3 * int(np.sum(~done))
        if n_cells > max_cells:
            raise ConvergenceError(f"curvature quadrature exceeded {max_cells} cells",
                                   best=total_k + float(np.sum(k_est)))
    # one-point correction for the slivers between chords and geodesic arcs
    kd, ad = _gauss_density(M, sliver_pt)
    total_k += float(np.sum(kd * sliver_area))
    total_a += float(np.sum(ad * sliver_area))
    # orientation of the boundary polygon fixes the overall sign
    sign = 1.0 if total_a >= 0 else -1.0
    return sign * total_k, sign * total_a, n_cells


# -- curvature integral: geodesic cone in higher dimension ------------------------------


def _exp_inverse(M, p, targets, V0, n=256, tol=1e-11, max_iter=30):
    """Batched shooting: initial velocities at ``p`` reaching each target at ``t = 1``."""
    m, d = targets.shape
    V = V0.copy()
    P = np.repeat(p[None], m * (d + 1), axis=0)
    for _ in range(max_iter):
        delta = 1e-7 * np.maximum(1.0, np.linalg.norm(V, axis=1))
        trial = np.repeat(V[:, None], d + 1, axis=1)
        trial[:, 1:] += delta[:, None, None] * np.eye(d)
        _, X, _, done = _rk4_geodesic(M, P, trial.reshape(-1, d), 1.0, n)
        if done < n:
            raise ConvergenceError("geodesic cone leaves the chart domain")
        end = X[-1].reshape(m, d + 1, d)
        res = targets - end[:, 0]
        if np.max(np.abs(res)) < tol:
            return V, end
        J = (end[:, 1:] - end[:, :1]).transpose(0, 2, 1) / delta[:, None, None]
        V = V + np.linalg.solve(J, res[..., None])[..., 0]
    raise ConvergenceError("geodesic cone shooting did not converge")


def _integral_cone(M, T: GeodesicTriangle, n_s=32, n_tau=256):
    """Curvature and area of the geodesic cone from vertex 0 over the opposite side.

    ``Sigma(s, tau) = exp_p(tau V(s))`` with ``exp_p V(s)`` running along the
    side from vertex 1 to vertex 2.  The integrand is the ambient sectional
    curvature of the tangent plane times the area element; this equals the
    intrinsic Gauss curvature when the cone is totally geodesic, as in the
    constant-curvature models.
    """
    p = T.vertices[0]
    d = len(p)
    xg, wg = np.polynomial.legendre.leggauss(n_s)
    s = 0.5 * (xg + 1.0)
    ws = 0.5 * wg
    side = T.sides[1].as_curve()
    targets = side.point(s)
    dtarget = side.velocity(s)
    # initial guess: blend of the two side directions at p
    v_a = T.sides[0].v[0]
    v_b = -T.sides[2].v[-1]
    V0 = (1 - s)[:, None] * v_a + s[:, None] * v_b
    V, _ = _exp_inverse(M, p, targets, V0)
    # dV/ds from the Jacobian of the endpoint map
    delta = 1e-7 * np.maximum(1.0, np.linalg.norm(V, axis=1))
    trial = np.repeat(V[:, None], d + 1, axis=1)
    trial[:, 1:] += delta[:, None, None] * np.eye(d)
    P = np.repeat(p[None], n_s * (d + 1), axis=0)
    _, X, _, _ = _rk4_geodesic(M, P, trial.reshape(-1, d), 1.0, n_tau)
    end = X[-1].reshape(n_s, d + 1, d)
    J = (end[:, 1:] - end[:, :1]).transpose(0, 2, 1) / delta[:, None, None]
    dV = np.linalg.solve(J, dtarget[..., None])[..., 0]
    # Sigma_s by a central difference in the direction dV
    eps = 1e-6
    P2 = np.repeat(p[None], 3 * n_s, axis=0)
    vel = np.concatenate([V, V + eps * dV, V - eps * dV])
    _, X, W, done = _rk4_geodesic(M, P2, vel, 1.0, n_tau)
    if done < n_tau:
        raise ConvergenceError("geodesic cone leaves the chart domain")
    Xc, Wc = X[:, :n_s], W[:, :n_s]
    Sig_s = (X[:, n_s:2 * n_s] - X[:, 2 * n_s:]) / (2 * eps)
    pts = Xc.reshape(-1, d)
    g = M.metric(pts)
    a = Sig_s.reshape(-1, d)
    b = Wc.reshape(-1, d)
    gaa = np.einsum("ni,nij,nj->n", a, g, a)
    gbb = np.einsum("ni,nij,nj->n", b, g, b)
    gab = np.einsum("ni,nij,nj->n", a, g, b)
    gram = np.maximum(gaa * gbb - gab ** 2, 0.0)
    R = riemann_batch(M, pts)
    low = np.einsum("nim,nmjkl->nijkl", g, R)
    num = np.einsum("nijkl,ni,nj,nk,nl->n", low, a, b, a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        K = np.where(gram > 0, num / np.where(gram > 0, gram, 1.0), 0.0)
    dens_a = np.sqrt(gram).reshape(n_tau + 1, n_s)
    dens_k = (K * np.sqrt(gram)).reshape(n_tau + 1, n_s)
    wt = np.ones(n_tau + 1)
    wt[1:-1:2], wt[2:-1:2] = 4.0, 2.0
    wt /= 3.0 * n_tau
    area = float(wt @ dens_a @ ws)
    integral = float(wt @ dens_k @ ws)
    return integral, area, n_s * n_tau


def triangle_integral(M: ChartMetric, T: GeodesicTriangle):
    """``(integral of K dA, area, cells)`` over the triangle interior."""
    if M.dim == 2:
        return _integral_2d(M, T)
    return _integral_cone(M, T)


# -- holonomy ---------------------------------------------------------------------


def _orthonormal_pair(g, a, b):
    e1 = a / np.sqrt(a @ g @ a)
    b = b - (e1 @ g @ b) * e1
    e2 = b / np.sqrt(b @ g @ b)
    return e1, e2


def triangle_holonomy(M: ChartMetric, T: GeodesicTriangle, n_steps=2048):
    """Rotation angle of parallel transport once around the perimeter.

    An orthonormal frame in the plane of the two sides at vertex 0 is carried
    along sides 0, 1, 2.  Returns ``(signed_angle, frame_residual)``, where the
    residual measures how far the transported frame is from orthonormal.
    """
    p = T.vertices[0]
    g = M.metric(p)
    e1, e2 = _orthonormal_pair(g, T.sides[0].v[0], -T.sides[2].v[-1])
    frame = np.column_stack([e1, e2])
    for side in T.sides:
        frame = transport_frame(M, side.as_curve(), frame, n_steps=n_steps)
    f1, f2 = frame[:, 0], frame[:, 1]
    gram = frame.T @ g @ frame
    residual = float(np.max(np.abs(gram - np.eye(2))))
    angle = math.atan2(f1 @ g @ e2, f1 @ g @ e1)
    return angle, residual


def _wrap(angle):
    return angle - 2 * math.pi * math.floor((angle + math.pi) / (2 * math.pi))


@dataclass
class TriangleReport:
    """Curvature integral, angle excess and holonomy of one geodesic triangle."""

    integral: float
    excess: float
    holonomy: float
    holonomy_signed: float
    area: float
    frame_residual: float
    cells: int
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "integral": self.integral,
            "excess": self.excess,
            "holonomy": self.holonomy,
            "holonomy_signed": self.holonomy_signed,
            "area": self.area,
            "frame_residual": self.frame_residual,
            "cells": self.cells,
            "residuals": dict(self.residuals),
        }


def triangle_report(M: ChartMetric, T: GeodesicTriangle) -> TriangleReport:
    """Compare the curvature integral, the angle excess and the holonomy angle.

    ``residuals["integral_vs_excess"] = |integral - excess|`` and
    ``residuals["holonomy_vs_excess"] = ||holonomy| - |excess||``, where the
    excess is first reduced to ``(-pi, pi]`` since a rotation angle is only
    defined modulo ``2 pi``.
    """
    integral, area, cells = triangle_integral(M, T)
    signed, frame_res = triangle_holonomy(M, T)
    excess = T.excess
    hol = abs(signed)
    return TriangleReport(
        integral=integral,
        excess=excess,
        holonomy=hol,
        holonomy_signed=signed,
        area=area,
        frame_residual=frame_res,
        cells=cells,
        residuals={
            "integral_vs_excess": abs(integral - excess),
            "holonomy_vs_excess": abs(hol - abs(_wrap(excess))),
        },
    )


# -- closed surfaces -------------------------------------------------------------------


def _closes_up(S: ParametricSurface, n=33, tol=1e-9):
    if S.rect is None or not np.all(np.isfinite(S.rect)):
        return False
    u0, u1, v0, v1 = S.rect
    u = np.linspace(u0, u1, n)
    v = np.linspace(v0, v1, n)

    def same(a, b):
        return np.max(np.abs(a - b)) < tol

    def point(a):
        return np.max(np.ptp(a, axis=0)) < tol

    # each pair of opposite edges must either be glued or collapse to points
    left, right = S(u0 + 0 * v, v), S(u1 + 0 * v, v)
    bottom, top = S(u, v0 + 0 * u), S(u, v1 + 0 * u)
    u_ok = same(left, right) or (point(left) and point(right))
    v_ok = same(bottom, top) or (point(bottom) and point(top))
    return u_ok and v_ok


def total_curvature_closed(S: ParametricSurface, chi: int, n0=32, n_max=1024, rtol=1e-12):
    """``(residual, total)`` with ``total = integral K dA`` over the parameter rectangle.

    Gauss-Legendre on ``n x n`` nodes, doubled until successive totals agree.
    ``residual = |total - 2 pi chi|``.

    Raises
    ------
    GeometryError
        If the surface does not close up on its parameter rectangle.
    """
    if not _closes_up(S):
        raise GeometryError(f"surface {S.name!r} is not closed on its parameter rectangle")
    u0, u1, v0, v1 = S.rect

    def total(n):
        xg, wg = np.polynomial.legendre.leggauss(n)
        uu = 0.5 * (u1 - u0) * xg + 0.5 * (u1 + u0)
        vv = 0.5 * (v1 - v0) * xg + 0.5 * (v1 + v0)
        U, V = np.meshgrid(uu, vv, indexing="ij")
        f = _forms(S, U, V)
        W = f["E"] * f["G"] - f["F"] ** 2
        K = (f["L"] * f["N"] - f["M"] ** 2) / W
        w = np.outer(wg, wg) * 0.25 * (u1 - u0) * (v1 - v0)
        return float(np.sum(w * K * np.sqrt(W)))

    n = n0
    prev = total(n)
    while n < n_max:
        n *= 2
        cur = total(n)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            prev = cur
            break
        prev = cur
    return abs(prev - 2 * math.pi * chi), prev


def euler_characteristic(v: int, e: int, f: int, triangulation=True) -> int:
    """``v - e + f``; warns when a triangulation violates ``3f = 2e``."""
    for name, x in (("v", v), ("e", e), ("f", f)):
        if int(x) != x or x < 0:
            raise GeometryError(f"{name} must be a nonnegative integer")
    if triangulation and 3 * f != 2 * e:
        warnings.warn(f"not a closed triangulation: 3f={3 * f} but 2e={2 * e}", stacklevel=2)
    return int(v - e + f)
