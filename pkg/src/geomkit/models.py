"""Named model geometries, cross-ratios and the classical triangle laws.

Every model comes with analytic metric derivatives so that Christoffel
symbols only need finite differences once (for curvature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, DomainError, GeometryError
from .metric import ChartMetric

__all__ = [
    "MODEL_NAMES",
    "ModelDescriptor",
    "TriangleData",
    "make_model",
    "parse_model",
    "euclidean",
    "sphere_stereographic",
    "riemann_constant",
    "poincare_half_plane",
    "beltrami_ball",
    "klein_disk",
    "tractrix_surface",
    "stereographic_projection",
    "inverse_stereographic",
    "expected_sectional",
    "cross_ratio",
    "klein_distance",
    "half_plane_distance",
    "mobius_half_plane",
    "triangle_law_residuals",
    "excess_defect_check",
]

MODEL_NAMES = (
    "euclidean",
    "sphere_stereographic",
    "riemann_constant",
    "poincare_half_plane",
    "beltrami_ball",
    "klein_disk",
    "tractrix_surface",
)


def _conformal(dim, phi, dphi, in_domain, name, params):
    """Metric ``phi(x) * I`` with gradient ``dphi(x)``."""
    eye = np.eye(dim)

    def g(x):
        return phi(x)[..., None, None] * eye

    def dg(x):
        return dphi(x)[..., :, None, None] * eye

    def gamma(x):
        # G^k_ij = d_ki w_j + d_kj w_i - d_ij w_k with w = grad(log phi)/2
        w = 0.5 * dphi(x) / phi(x)[..., None]
        a = eye[:, :, None] * w[..., None, None, :]
        return a + np.swapaxes(a, -1, -2) - eye * w[..., :, None, None]

    return ChartMetric(dim=dim, g=g, dg=dg, in_domain=in_domain, name=name, params=params,
                       christoffel=gamma)


def euclidean(dim=2):
    """Flat metric on R^dim."""
    return _conformal(
        dim,
        lambda x: np.ones(np.shape(x)[:-1]),
        lambda x: np.zeros(np.shape(x)),
        None,
        "euclidean",
        {"dim": dim},
    )


def riemann_constant(dim=2, alpha=0.0):
    """``sum dx_i^2 / (1 + alpha/4 * |x|^2)^2``, constant curvature ``alpha``."""
    alpha = float(alpha)

    def base(x):
        return 1.0 + 0.25 * alpha * np.sum(x * x, axis=-1)

    def phi(x):
        return base(x) ** -2

    def dphi(x):
        return (-alpha * base(x) ** -3)[..., None] * x

    def inside(x):
        return base(x) > 0.0

    return _conformal(dim, phi, dphi, inside, "riemann_constant", {"dim": dim, "alpha": alpha})


def beltrami_ball(dim=3):
    """Open ball of radius 2 with ``ds^2 = |dx|^2 / (1 - |x|^2/4)^2`` (curvature -1)."""
    m = riemann_constant(dim, -1.0)
    return ChartMetric(dim=dim, g=m.g, dg=m.dg, in_domain=m.in_domain,
                       name="beltrami_ball", params={"dim": dim}, christoffel=m.christoffel)


def sphere_stereographic(dim=2, R=1.0):
    """Round sphere of radius ``R`` read through stereographic projection.

    The chart is the projection from the north pole ``(0,...,0,R)``;
    the pulled-back metric is ``4 R^4 |dy|^2 / (R^2 + |y|^2)^2``.
    """
    R = float(R)
    if not R > 0:
        raise GeometryError(f"sphere radius must be positive, got {R}")
    R2 = R * R
    R4 = R2 * R2

    def phi(x):
        return 4.0 * R4 / (R2 + np.sum(x * x, axis=-1)) ** 2

    def dphi(x):
        return (-16.0 * R4 / (R2 + np.sum(x * x, axis=-1)) ** 3)[..., None] * x

    return _conformal(dim, phi, dphi, None, "sphere_stereographic", {"dim": dim, "R": R})


def stereographic_projection(X, R=1.0):
    """Sphere point(s) in R^(d+1) -> chart point(s) in R^d."""
    X = np.asarray(X, dtype=float)
    return R * X[..., :-1] / (R - X[..., -1:])


def inverse_stereographic(y, R=1.0):
    """Chart point(s) in R^d -> sphere point(s) of radius ``R``."""
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1, keepdims=True)
    top = 2.0 * R * R * y / (R * R + r2)
    last = R * (r2 - R * R) / (R * R + r2)
    return np.concatenate([top, last], axis=-1)


def poincare_half_plane(dim=2):
    """Upper half-space ``x_d > 0`` with ``ds^2 = |dx|^2 / x_d^2``."""

    def phi(x):
        return x[..., -1] ** -2

    def dphi(x):
        out = np.zeros(np.shape(x))
        out[..., -1] = -2.0 * x[..., -1] ** -3
        return out

    def inside(x):
        return x[..., -1] > 0.0

    return _conformal(dim, phi, dphi, inside, "poincare_half_plane", {"dim": dim})


def klein_disk():
    """Unit disk with ``{(1-r^2)|dx|^2 + (x.dx)^2} / (1-r^2)^2``."""
    eye = np.eye(2)

    def g(x):
        s = 1.0 - np.sum(x * x, axis=-1)
        outer = x[..., :, None] * x[..., None, :]
        return eye / s[..., None, None] + outer / (s * s)[..., None, None]

    def dg(x):
        s = 1.0 - np.sum(x * x, axis=-1)
        s2 = (s * s)[..., None, None, None]
        s3 = (s * s * s)[..., None, None, None]
        xk = x[..., :, None, None]
        term1 = 2.0 * xk * eye / s2
        # d_k (x_i x_j) = delta_ik x_j + x_i delta_jk
        dx = eye[:, :, None] * x[..., None, None, :] + x[..., None, :, None] * eye[:, None, :]
        term2 = dx / s2
        term3 = 4.0 * xk * (x[..., None, :, None] * x[..., None, None, :]) / s3
        return term1 + term2 + term3

    def inside(x):
        return np.sum(x * x, axis=-1) < 1.0

    return ChartMetric(dim=2, g=g, dg=dg, in_domain=inside, name="klein_disk", params={})


def tractrix_surface(R=1.0):
    """Intrinsic metric of the surface of revolution of the tractrix.

    Coordinates ``(u, v)`` with ``u > 0``: the surface is
    ``(R sech u cos v, R sech u sin v, R (u - tanh u))`` so
    ``ds^2 = R^2 tanh^2 u du^2 + R^2 sech^2 u dv^2``.
    """
    R = float(R)
    if not R > 0:
        raise GeometryError(f"tractrix parameter must be positive, got {R}")
    R2 = R * R

    def g(x):
        u = x[..., 0]
        out = np.zeros(np.shape(x)[:-1] + (2, 2))
        out[..., 0, 0] = R2 * np.tanh(u) ** 2
        out[..., 1, 1] = R2 / np.cosh(u) ** 2
        return out

    def dg(x):
        u = x[..., 0]
        t = np.tanh(u)
        sech2 = 1.0 / np.cosh(u) ** 2
        out = np.zeros(np.shape(x)[:-1] + (2, 2, 2))
        out[..., 0, 0, 0] = 2.0 * R2 * t * sech2
        out[..., 0, 1, 1] = -2.0 * R2 * sech2 * t
        return out

    def inside(x):
        return x[..., 0] > 0.0

    return ChartMetric(dim=2, g=g, dg=dg, in_domain=inside, name="tractrix_surface", params={"R": R})


@dataclass(frozen=True)
class ModelDescriptor:
    """Registry name plus parameters, e.g. ``ModelDescriptor("sphere_stereographic", 2, {"R": 2})``."""

    name: str
    dim: int = 2
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in MODEL_NAMES:
            raise GeometryError(f"unknown model {self.name!r}; choose from {', '.join(MODEL_NAMES)}")


def make_model(desc) -> ChartMetric:
    """Build the ChartMetric for a :class:`ModelDescriptor` (or a ``name:k=v`` string)."""
    if isinstance(desc, str):
        desc = parse_model(desc)
    p = dict(desc.params)
    name, dim = desc.name, int(desc.dim)
    if name == "euclidean":
        return euclidean(dim)
    if name == "sphere_stereographic":
        return sphere_stereographic(dim, p.get("R", 1.0))
    if name == "riemann_constant":
        return riemann_constant(dim, p.get("alpha", 0.0))
    if name == "poincare_half_plane":
        return poincare_half_plane(dim)
    if name == "beltrami_ball":
        return beltrami_ball(dim)
    if name == "klein_disk":
        if dim != 2:
            raise GeometryError("klein_disk is two-dimensional")
        return klein_disk()
    if name == "tractrix_surface":
        if dim != 2:
            raise GeometryError("tractrix_surface is two-dimensional")
        return tractrix_surface(p.get("R", 1.0))
    raise GeometryError(f"unknown model {name!r}")  # pragma: no cover


def expected_sectional(desc) -> float:
    """Constant sectional curvature of a registry model."""
    if isinstance(desc, str):
        desc = parse_model(desc)
    p = desc.params
    return {
        "euclidean": 0.0,
        "sphere_stereographic": 1.0 / float(p.get("R", 1.0)) ** 2,
        "riemann_constant": float(p.get("alpha", 0.0)),
        "poincare_half_plane": -1.0,
        "beltrami_ball": -1.0,
        "klein_disk": -1.0,
        "tractrix_surface": -1.0 / float(p.get("R", 1.0)) ** 2,
    }[desc.name]


def parse_model(text: str) -> ModelDescriptor:
    """Parse ``name`` or ``name:key=val,key=val`` (``dim`` is a recognised key)."""
    name, _, rest = text.partition(":")
    params = {}
    dim = None
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise GeometryError(f"malformed model parameter {item!r} (expected key=value)")
        key = key.strip()
        try:
            num = float(val)
        except ValueError:
            raise GeometryError(f"model parameter {key!r} is not a number: {val!r}") from None
        if key == "dim":
            dim = int(num)
        else:
            params[key] = num
    if dim is None:
        dim = 3 if name.strip() == "beltrami_ball" else 2
    return ModelDescriptor(name.strip(), dim, params)


# -- projective and hyperbolic distance -------------------------------------


def _line_coordinates(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        return pts
    base = pts[0]
    diffs = pts - base
    k = np.argmax(np.linalg.norm(diffs, axis=1))
    direction = diffs[k]
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise DegenerateError("all four points coincide")
    direction = direction / norm
    off = diffs - np.outer(diffs @ direction, direction)
    if np.max(np.linalg.norm(off, axis=1)) > 1e-9 * max(1.0, norm):
        raise DegenerateError("points are not collinear")
    return diffs @ direction


def cross_ratio(x1, x2, x3, x4) -> float:
    """``(x3 - x1)(x4 - x2) / ((x3 - x2)(x4 - x1))`` for reals or collinear points."""
    if np.ndim(x1) == 0:
        a, b, c, d = (float(v) for v in (x1, x2, x3, x4))
    else:
        a, b, c, d = _line_coordinates([x1, x2, x3, x4])
    den = (c - b) * (d - a)
    if den == 0.0:
        raise DegenerateError("coincident points make the cross-ratio undefined")
    return (c - a) * (d - b) / den


def klein_distance(P, Q) -> float:
    """Hyperbolic distance in the Klein disk via the chord endpoints.

    With ``A, P, Q, B`` in order along the chord this is
    ``1/2 |log((AQ * BP) / (AP * BQ))|``.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P @ P >= 1.0 or Q @ Q >= 1.0:
        raise DomainError("Klein disk points must lie strictly inside the unit disk")
    d = Q - P
    a = d @ d
    if a == 0.0:
        return 0.0
    b = 2.0 * (P @ d)
    c = P @ P - 1.0
    disc = b * b - 4.0 * a * c
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r1, r2 = q / a, c / q
    sA, sB = min(r1, r2), max(r1, r2)
    # P at s=0, Q at s=1; sA < 0 < 1 < sB
    ratio = ((1.0 - sA) * sB) / ((-sA) * (sB - 1.0))
    return 0.5 * abs(math.log(ratio))


def half_plane_distance(p, q) -> float:
    """Closed-form distance in the Poincare half-plane (used as an oracle)."""
    (x1, y1), (x2, y2) = np.asarray(p, float), np.asarray(q, float)
    return float(np.arccosh(1.0 + ((x2 - x1) ** 2 + (y2 - y1) ** 2) / (2.0 * y1 * y2)))


def mobius_half_plane(a, b, c, d):
    """The map ``z -> (az+b)/(cz+d)`` on half-plane points ``(x, y)``; needs ``ad - bc > 0``."""
    if not a * d - b * c > 0:
        raise GeometryError("half-plane Mobius maps need ad - bc > 0")

    def T(p):
        p = np.asarray(p, dtype=float)
        z = p[..., 0] + 1j * p[..., 1]
        w = (a * z + b) / (c * z + d)
        return np.stack([w.real, w.imag], axis=-1)

    return T


# -- triangle laws ------------------------------------------------------------


@dataclass(frozen=True)
class TriangleData:
    """Sides ``a, b, c`` opposite angles ``A, B, C`` on a space of scale ``R``."""

    a: float
    b: float
    c: float
    A: float
    B: float
    C: float
    R: float = 1.0

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise DegenerateError("triangle sides must be positive")
        if not all(0.0 < t < math.pi for t in (self.A, self.B, self.C)):
            raise DegenerateError("triangle angles must lie in (0, pi)")
        if self.R <= 0:
            raise GeometryError("R must be positive")

    def relabelings(self):
        s, ang = (self.a, self.b, self.c), (self.A, self.B, self.C)
        for k in range(3):
            yield s[k], s[(k + 1) % 3], s[(k + 2) % 3], ang[k], ang[(k + 1) % 3], ang[(k + 2) % 3]


def triangle_law_residuals(T: TriangleData, mode="spherical") -> np.ndarray:
    """Residuals of the angle-cosine and side-cosine laws, three relabelings each.

    Returns an array of six numbers ordered ``[angle_0, side_0, angle_1, ...]``.
    """
    if mode == "spherical":
        cs, sn, sign = math.cos, math.sin, 1.0
    elif mode == "hyperbolic":
        cs, sn, sign = math.cosh, math.sinh, -1.0
    else:
        raise GeometryError(f"mode must be 'spherical' or 'hyperbolic', got {mode!r}")
    R = T.R
    out = []
    for a, b, c, A, B, C in T.relabelings():
        angle_law = math.cos(A) - (-math.cos(B) * math.cos(C) + math.sin(B) * math.sin(C) * cs(a / R))
        side_law = cs(a / R) - (cs(b / R) * cs(c / R) + sign * sn(b / R) * sn(c / R) * math.cos(A))
        out += [angle_law, side_law]
    return np.array(out)


def excess_defect_check(T: TriangleData, area: float, mode="spherical") -> float:
    """``|excess - area/R^2|`` (spherical) or ``|defect - area/R^2|`` (hyperbolic)."""
    total = T.A + T.B + T.C
    if mode == "spherical":
        return abs((total - math.pi) - area / T.R ** 2)
    if mode == "hyperbolic":
        return abs((math.pi - total) - area / T.R ** 2)
    raise GeometryError(f"mode must be 'spherical' or 'hyperbolic', got {mode!r}")
