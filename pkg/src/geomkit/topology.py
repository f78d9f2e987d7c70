"""Invariants of closed sampled curves: winding, rotation, signed area, crossings, linking."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateError, GeometryError

__all__ = [
    "PolyCurve",
    "winding_number",
    "rotation_invariants",
    "smooth_total_curvature",
    "signed_area",
    "meister_decomposition",
    "self_intersections",
    "linking_number",
    "circle",
    "figure_eight",
    "power_image",
    "trefoil_projection",
    "random_fourier_curve",
    "FourierCurve",
    "hopf_link",
    "space_circle",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolyCurve:
    """Closed (or open) polygonal curve in the plane or in space.

    Parameters
    ----------
    points : array_like, shape (n, 2) or (n, 3)
    closed : bool
        When True the last point is joined back to the first.
    """

    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        P = np.array(self.points, dtype=float)
        if P.ndim != 2 or P.shape[1] not in (2, 3):
            raise GeometryError(f"points must have shape (n, 2) or (n, 3), got {P.shape}")
        if not np.all(np.isfinite(P)):
            raise GeometryError("curve points must be finite")
        if self.closed and len(P) < 3:
            raise DegenerateError("a closed curve needs at least 3 points")
        if len(P) < 2:
            raise DegenerateError("a curve needs at least 2 points")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        if np.min(np.linalg.norm(self.edges(), axis=1)) <= 1e-12:
            raise DegenerateError("consecutive curve points coincide")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)

    def edges(self) -> np.ndarray:
        P = self.points
        nxt = np.roll(P, -1, axis=0) if self.closed else P[1:]
        return nxt - P[: len(nxt)]

    def segments(self):
        """``(starts, ends)`` of every segment."""
        P = self.points
        if self.closed:
            return P, np.roll(P, -1, axis=0)
        return P[:-1], P[1:]

    def reversed(self) -> "PolyCurve":
        return PolyCurve(self.points[::-1].copy(), self.closed)

    def transformed(self, A, b=None) -> "PolyCurve":
        """Image under ``x -> A x + b``."""
        A = np.asarray(A, float)
        b = np.zeros(self.dim) if b is None else np.asarray(b, float)
        return PolyCurve(self.points @ A.T + b, self.closed)

    def refined(self) -> "PolyCurve":
        """Insert the midpoint of every segment."""
        a, b = self.segments()
        mid = 0.5 * (a + b)
        if self.closed:
            out = np.empty((2 * len(a), self.dim))
            out[0::2], out[1::2] = a, mid
        else:
            out = np.empty((2 * len(a) + 1, self.dim))
            out[0:-1:2], out[1::2], out[-1] = a, mid, b[-1]
        return PolyCurve(out, self.closed)

    def to_json(self) -> str:
        return json.dumps({"closed": bool(self.closed), "points": self.points.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "PolyCurve":
        """Parse ``{"closed": true, "points": [[x, y], ...]}``."""
        try:
            data = json.loads(text)
            points = data["points"]
            closed = bool(data.get("closed", True))
            points = np.asarray(points, dtype=float)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise GeometryError(f"malformed curve JSON: {exc}") from exc
        return cls(points, closed)

    @classmethod
    def load(cls, path) -> "PolyCurve":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _require_closed_planar(c: PolyCurve):
    if not c.closed:
        raise GeometryError("operation needs a closed curve")
    if c.dim != 2:
        raise GeometryError("operation needs a plane curve")


def _point_segment_distance(p, a, b):
    ab = b - a
    t = np.clip(np.einsum("...i,...i->...", p - a, ab) / np.einsum("...i,...i->...", ab, ab), 0.0, 1.0)
    return np.linalg.norm(a + t[..., None] * ab - p, axis=-1)


# -- winding and rotation ------------------------------------------------------------


def winding_number(c: PolyCurve, p0, on_curve_tol=1e-9) -> int:
    """Number of turns of ``c`` around ``p0``.

    Sums the signed angle subtended by each segment, which integrates the
    winding form exactly on a polygon.

    Raises
    ------
    DegenerateError
        If ``p0`` lies within ``on_curve_tol`` of the curve.
    """
    _require_closed_planar(c)
    p0 = np.asarray(p0, dtype=float)
    a, b = c.segments()
    if np.min(_point_segment_distance(p0, a, b)) < on_curve_tol:
        raise DegenerateError("reference point lies on the curve")
    u, v = a - p0, b - p0
    total = float(np.sum(np.arctan2(_cross2(u, v), np.einsum("ij,ij->i", u, v))))
    w = total / TWO_PI
    k = round(w)
    if abs(w - k) > 1e-6:
        raise GeometryError(f"winding sum {w!r} is not close to an integer")
    return int(k)


def _turning_angles(c: PolyCurve):
    e = c.edges()
    f = np.roll(e, -1, axis=0)
    cr = _cross2(e, f)
    dt = np.einsum("ij,ij->i", e, f)
    scale = np.linalg.norm(e, axis=1) * np.linalg.norm(f, axis=1)
    if np.any((dt < 0) & (np.abs(cr) <= 1e-12 * scale)):
        raise DegenerateError("curve has a cusp (anti-parallel consecutive edges)")
    return np.arctan2(cr, dt)


def rotation_invariants(c: PolyCurve):
    """``(rotation_number, total_signed_curvature)`` from the exterior angles.

    The total signed curvature of a polygon is the sum of its signed turning
    angles; the rotation number is that sum over ``2 pi``.
    """
    _require_closed_planar(c)
    total = float(np.sum(_turning_angles(c)))
    return int(round(total / TWO_PI)), total


def smooth_total_curvature(derivatives, n0=512, n_max=2 ** 18, rtol=1e-12):
    """``integral kappa ds`` of a smooth closed curve with period ``2 pi``.

    ``derivatives(t)`` returns ``(x', y', x'', y'')`` at parameters ``t``;
    ``kappa ds = (x'y'' - y'x'')/(x'^2 + y'^2) dt``.  The periodic trapezoid
    rule is doubled until two estimates agree.
    """

    def estimate(n):
        dx, dy, ddx, ddy = (np.asarray(a, float) for a in derivatives(_t(n)))
        sp = dx * dx + dy * dy
        if np.any(sp <= 0):
            raise DegenerateError("curve is not regular")
        return float(np.mean((dx * ddy - dy * ddx) / sp) * TWO_PI)

    n = n0
    prev = estimate(n)
    while n < n_max:
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError("total curvature quadrature did not converge", best=prev)


# -- signed area and Meister decomposition ---------------------------------------------


def _grid_winding(c: PolyCurve, xc, yc):
    """Winding numbers at the grid of cell centres ``xc x yc`` (nonzero crossing rule)."""
    a, b = c.segments()
    ya, yb = a[:, 1][:, None], b[:, 1][:, None]
    Y = yc[None, :]
    up = (ya <= Y) & (Y < yb)
    down = (yb <= Y) & (Y < ya)
    cross = up | down
    seg, row = np.nonzero(cross)
    t = (yc[row] - a[seg, 1]) / (b[seg, 1] - a[seg, 1])
    xs = a[seg, 0] + t * (b[seg, 0] - a[seg, 0])
    sign = np.where(up[seg, row], 1, -1)
    # cells left of the crossing see it on their rightward ray
    k = np.searchsorted(xc, xs, side="left")
    D = np.zeros((len(yc), len(xc) + 1), dtype=np.int64)
    np.add.at(D, (row, np.zeros_like(row)), sign)
    np.add.at(D, (row, k), -sign)
    return np.cumsum(D[:, :-1], axis=1)


def _near_curve_mask(c: PolyCurve, x0, y0, h, n, reach=2):
    """Cells within ``reach`` cells of a dense resampling of the curve."""
    a, b = c.segments()
    L = np.linalg.norm(b - a, axis=1)
    m = np.maximum(1, np.ceil(2 * L / h).astype(int))
    idx = np.repeat(np.arange(len(a)), m)
    frac = (np.arange(m.sum()) - np.repeat(np.cumsum(m) - m, m)) / np.repeat(m, m)
    pts = a[idx] + frac[:, None] * (b - a)[idx]
    i = np.clip(((pts[:, 0] - x0) / h).astype(int), 0, n - 1)
    j = np.clip(((pts[:, 1] - y0) / h).astype(int), 0, n - 1)
    mask = np.zeros((n, n), dtype=bool)
    mask[j, i] = True
    out = mask.copy()
    for dj in range(-reach, reach + 1):
        for di in range(-reach, reach + 1):
            out |= np.roll(np.roll(mask, dj, axis=0), di, axis=1)
    return out


def meister_decomposition(c: PolyCurve, n=64):
    """Winding-weighted cell areas on an ``n x n`` grid over the bounding square.

    Returns ``(far, near, bound)``.  ``far`` sums ``W(c, centre)`` times the
    cell area over cells more than two cells away from the curve, ``near``
    does the same over the remaining band, and ``bound = max |W|`` times the
    band area, so ``|area - far| <= bound`` up to the grid error.
    """
    _require_closed_planar(c)
    lo = c.points.min(axis=0)
    hi = c.points.max(axis=0)
    span = float(np.max(hi - lo)) * 1.1
    mid = 0.5 * (lo + hi)
    x0, y0 = mid - 0.5 * span
    h = span / n
    xc = x0 + h * (np.arange(n) + 0.5)
    yc = y0 + h * (np.arange(n) + 0.5)
    W = _grid_winding(c, xc, yc)
    near = _near_curve_mask(c, x0, y0, h, n)
    far_sum = float(np.sum(W[~near])) * h * h
    near_sum = float(np.sum(W[near])) * h * h
    bound = float(np.max(np.abs(W), initial=0)) * float(np.sum(near)) * h * h
    return far_sum, near_sum, bound


def signed_area(c: PolyCurve, n0=64, n_max=512):
    """``(area, decomposition_residual)``.

    ``area`` is the shoelace value of ``(1/2) integral (x dy - y dx)``.  The
    residual is ``|area - sum W(c, D_k) Area(D_k)|`` over the cells of the
    finest grid (``n0`` doubled up to ``n_max``); it shrinks with the grid
    spacing.
    """
    _require_closed_planar(c)
    a, b = c.segments()
    area = 0.5 * float(np.sum(_cross2(a, b)))
    n = n0
    residual = math.inf
    while n <= n_max:
        far, near, _ = meister_decomposition(c, n)
        residual = abs(area - far - near)
        n *= 2
    return area, residual


# -- self-intersections --------------------------------------------------------------------


def _cyclic_runs(indices, n):
    """Number of maximal runs of cyclically consecutive integers in ``indices`` (mod ``n``)."""
    s = sorted(set(int(i) % n for i in indices))
    if len(s) == n:
        return 1
    members = set(s)
    return sum(1 for i in s if (i - 1) % n not in members)


def self_intersections(c: PolyCurve, tol=None):
    """``(count, points)`` of transverse self-crossings of a closed plane curve.

    Intersections between non-adjacent segments are clustered; each cluster
    is a crossing when the curve passes through it exactly twice (a crossing
    at a sample point touches two segments of the same pass).

    Raises
    ------
    DegenerateError
        If three or more passes meet at one point (non-generic curve).
    """
    _require_closed_planar(c)
    n = len(c)
    a, b = c.segments()
    scale = float(np.max(np.ptp(c.points, axis=0)))
    eps = 1e-12 * scale if tol is None else tol
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    # bounding-box prefilter
    lo = np.minimum(a, b) - eps
    hi = np.maximum(a, b) + eps
    ov = np.all((lo[i] <= hi[j]) & (lo[j] <= hi[i]), axis=1)
    i, j = i[ov], j[ov]
    r = b[i] - a[i]
    s = b[j] - a[j]
    qp = a[j] - a[i]
    den = _cross2(r, s)
    ok = np.abs(den) > eps * (np.linalg.norm(r, axis=1) * np.linalg.norm(s, axis=1))
    if np.any(~ok):
        # parallel pairs: only overlapping collinear ones matter
        par = ~ok
        col = np.abs(_cross2(qp[par], r[par])) <= eps * np.linalg.norm(r[par], axis=1) * max(scale, 1.0)
        if np.any(col):
            raise DegenerateError("collinear overlapping segments (non-generic curve)")
    i, j, r, s, qp, den = i[ok], j[ok], r[ok], s[ok], qp[ok], den[ok]
    t = _cross2(qp, s) / den
    u = _cross2(qp, r) / den
    rel = 1e-10
    hit = (t >= -rel) & (t <= 1 + rel) & (u >= -rel) & (u <= 1 + rel)
    i, j, t = i[hit], j[hit], t[hit]
    pts = a[i] + t[:, None] * (b[i] - a[i])
    # cluster hits that are the same geometric point
    clusters = []
    ctol = max(1e-9 * scale, eps)
    for k in range(len(pts)):
        for cl in clusters:
            if np.linalg.norm(cl["p"] - pts[k]) <= ctol:
                cl["segs"].update((int(i[k]), int(j[k])))
                break
        else:
            clusters.append({"p": pts[k], "segs": {int(i[k]), int(j[k])}})
    crossings = []
    for cl in clusters:
        passes = _cyclic_runs(cl["segs"], n)
        if passes >= 3:
            raise DegenerateError("three or more passes through one point (non-generic curve)")
        if passes == 2:
            crossings.append(cl["p"])
    return len(crossings), [p.tolist() for p in crossings]


# -- linking number -----------------------------------------------------------------------


def _segment_distances(a1, b1, a2, b2):
    """Minimum distance between every segment of one polyline and every segment of another."""
    d1 = (b1 - a1)[:, None, :]
    d2 = (b2 - a2)[None, :, :]
    r = a1[:, None, :] - a2[None, :, :]
    A = np.sum(d1 * d1, -1)
    E = np.sum(d2 * d2, -1)
    F = np.sum(d2 * r, -1)
    B = np.sum(d1 * d2, -1)
    C = np.sum(d1 * r, -1)
    den = A * E - B * B
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(den > 1e-300, np.clip((B * F - C * E) / den, 0, 1), 0.0)
    t = (B * s + F) / E
    t = np.clip(t, 0, 1)
    s = np.clip((B * t - C) / A, 0, 1)
    diff = r + s[..., None] * d1 - t[..., None] * d2
    return np.linalg.norm(diff, axis=-1)


def _gauss_sum(c1: PolyCurve, c2: PolyCurve, chunk=1024):
    a1, b1 = c1.segments()
    a2, b2 = c2.segments()
    m1, d1 = 0.5 * (a1 + b1), b1 - a1
    m2, d2 = 0.5 * (a2 + b2), b2 - a2
    total = 0.0
    for s in range(0, len(m1), chunk):
        r = m2[None, :, :] - m1[s:s + chunk, None, :]
        cr = np.cross(d1[s:s + chunk, None, :], d2[None, :, :])
        num = np.sum(r * cr, axis=-1)
        den = np.linalg.norm(r, axis=-1) ** 3
        total += float(np.sum(num / den))
    return total


def linking_number(c1: PolyCurve, c2: PolyCurve, min_distance=1e-6, max_pairs=2 ** 22):
    """``(m, raw_integral)`` from the Gauss double integral.

    ``raw = sum over segment pairs of (r2 - r1) . (dr1 x dr2) / |r2 - r1|^3``
    (midpoint rule), which approximates ``4 pi m``.  Both curves are refined
    by midpoint insertion until ``m`` repeats and ``|raw/4pi - m| < 1e-2``.

    Raises
    ------
    DegenerateError
        If the curves come within ``min_distance`` of each other.
    ConvergenceError
        If the pair budget is exhausted first.
    """
    for c in (c1, c2):
        if c.dim != 3 or not c.closed:
            raise GeometryError("linking_number needs closed space curves")
    a1, b1 = c1.segments()
    a2, b2 = c2.segments()
    if float(np.min(_segment_distances(a1, b1, a2, b2))) <= min_distance:
        raise DegenerateError("curves are too close for the linking quadrature")
    prev_m = None
    while True:
        raw = _gauss_sum(c1, c2)
        ratio = raw / (4 * math.pi)
        m = int(round(ratio))
        if m == prev_m and abs(ratio - m) < 1e-2:
            return m, raw
        prev_m = m
        if 4 * len(c1) * len(c2) > max_pairs:
            raise ConvergenceError("linking quadrature budget exhausted", best=m, residual=abs(ratio - m))
        c1, c2 = c1.refined(), c2.refined()


# -- canonical curves ---------------------------------------------------------------------


def _t(n):
    return TWO_PI * np.arange(n) / n


def circle(n=256, radius=1.0, center=(0.0, 0.0), ccw=True) -> PolyCurve:
    t = _t(n) if ccw else -_t(n)
    return PolyCurve(np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)]))


def figure_eight(n=512) -> PolyCurve:
    """``(sin 2t, sin t)``; crosses itself once, at the origin."""
    t = _t(n)
    return PolyCurve(np.column_stack([np.sin(2 * t), np.sin(t)]))


def power_image(n=256, radius=2.0, power=2) -> PolyCurve:
    """Image of the circle ``|z| = radius`` under ``z -> z**power``."""
    z = (radius * np.exp(1j * _t(n))) ** power
    return PolyCurve(np.column_stack([z.real, z.imag]))


def trefoil_projection(n=512) -> PolyCurve:
    """``(sin t + 2 sin 2t, cos t - 2 cos 2t)``: three crossings, rotation number 2 in absolute value."""
    t = _t(n)
    return PolyCurve(np.column_stack([np.sin(t) + 2 * np.sin(2 * t), np.cos(t) - 2 * np.cos(2 * t)]))


@dataclass(frozen=True)
class FourierCurve:
    """``x(t) = sum_k cx_k cos kt + sx_k sin kt`` and likewise ``y``, for ``k = 1..K``."""

    cx: np.ndarray
    sx: np.ndarray
    cy: np.ndarray
    sy: np.ndarray

    def _basis(self, t):
        k = np.arange(1, len(self.cx) + 1)
        t = np.asarray(t, float)[:, None]
        return k, np.cos(k * t), np.sin(k * t)

    def sample(self, n=512) -> PolyCurve:
        k, C, S = self._basis(_t(n))
        return PolyCurve(np.column_stack([C @ self.cx + S @ self.sx, C @ self.cy + S @ self.sy]))

    def derivatives(self, t):
        k, C, S = self._basis(t)
        dx = (-S * k) @ self.cx + (C * k) @ self.sx
        dy = (-S * k) @ self.cy + (C * k) @ self.sy
        ddx = (-C * k * k) @ self.cx + (-S * k * k) @ self.sx
        ddy = (-C * k * k) @ self.cy + (-S * k * k) @ self.sy
        return dx, dy, ddx, ddy


def random_fourier_curve(rng, max_order=5, decay=1.5, min_speed_ratio=0.05) -> FourierCurve:
    """Random smooth closed curve from a truncated Fourier series.

    The order ``K`` is uniform in ``1..max_order`` and coefficients of order
    ``k`` are ``N(0, k^(-2 decay))``.  Draws whose speed drops below
    ``min_speed_ratio`` times their peak speed (near-cusps, which no fixed
    sampling resolves) are redrawn.
    """
    while True:
        K = int(rng.integers(1, max_order + 1))
        amp = np.arange(1, K + 1) ** -decay
        fc = FourierCurve(*(rng.normal(size=K) * amp for _ in range(4)))
        dx, dy, _, _ = fc.derivatives(_t(4096))
        speed = np.hypot(dx, dy)
        if speed.min() >= min_speed_ratio * speed.max():
            return fc


def space_circle(n=256, radius=1.0, center=(0.0, 0.0, 0.0), normal_axis=2) -> PolyCurve:
    """Circle in the coordinate plane orthogonal to axis ``normal_axis``."""
    t = _t(n)
    P = np.zeros((n, 3))
    a, b = [i for i in range(3) if i != normal_axis]
    P[:, a] = radius * np.cos(t)
    P[:, b] = radius * np.sin(t)
    return PolyCurve(P + np.asarray(center, float))


def hopf_link(n=256):
    """Unit circle in the xy-plane and unit circle in the xz-plane centred at ``(1, 0, 0)``."""
    return space_circle(n), space_circle(n, center=(1.0, 0.0, 0.0), normal_axis=1)
