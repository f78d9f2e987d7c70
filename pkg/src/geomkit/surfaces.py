"""Parametric surfaces in 3-space: fundamental forms, curvatures, Codazzi residuals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateError, DomainError, GeometryError
from .metric import ChartMetric

__all__ = [
    "ParametricSurface",
    "FundamentalForms",
    "SurfaceCurvatures",
    "plane",
    "sphere",
    "cylinder",
    "torus",
    "graph",
    "random_graph",
    "tractrix",
    "tractrix_profile",
    "SURFACE_NAMES",
    "make_surface",
    "fundamental_forms",
    "curvatures",
    "codazzi_residuals",
    "induced_metric",
    "surface_area",
]

FD_STEP = 1e-5
SECOND_STEP = 1e-4
OUTER_STEP = 1e-4
DEGENERATE_TOL = 1e-12


def _step(base, u):
    return base * (1.0 + np.abs(u))


@dataclass(frozen=True)
class ParametricSurface:
    """A map ``(u, v) -> R^3`` with optional analytic partial derivatives.

    Every callable takes broadcastable arrays ``u, v`` and returns an array of
    shape ``broadcast(u, v).shape + (3,)``.  Missing partials are replaced by
    central differences (step ``1e-5 (1+|u|)`` for first partials and
    ``1e-4 (1+|u|)`` for second partials).

    Parameters
    ----------
    S : callable
        The parameterization.
    Su, Sv, Suu, Suv, Svv : callable, optional
        Analytic partials.
    rect : tuple, optional
        Parameter rectangle ``(u0, u1, v0, v1)``; points must lie in its
        closure.  ``None`` means the whole plane.
    in_domain : callable, optional
        Extra predicate on ``(u, v)``.
    """

    S: Callable
    Su: Optional[Callable] = None
    Sv: Optional[Callable] = None
    Suu: Optional[Callable] = None
    Suv: Optional[Callable] = None
    Svv: Optional[Callable] = None
    rect: Optional[tuple] = None
    in_domain: Optional[Callable] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, u, v):
        return self.S(np.asarray(u, float), np.asarray(v, float))

    def contains(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        ok = np.isfinite(u) & np.isfinite(v)
        if self.rect is not None:
            u0, u1, v0, v1 = self.rect
            ok &= (u >= u0) & (u <= u1) & (v >= v0) & (v <= v1)
        if self.in_domain is not None:
            ok &= np.asarray(self.in_domain(u, v), bool)
        return ok

    def first_partials(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if self.Su is not None and self.Sv is not None:
            return self.Su(u, v), self.Sv(u, v)
        hu = _step(FD_STEP, u)[..., None]
        hv = _step(FD_STEP, v)[..., None]
        S = self.S
        Su = (S(u + hu[..., 0], v) - S(u - hu[..., 0], v)) / (2 * hu)
        Sv = (S(u, v + hv[..., 0]) - S(u, v - hv[..., 0])) / (2 * hv)
        return Su, Sv

    def second_partials(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if self.Suu is not None and self.Suv is not None and self.Svv is not None:
            return self.Suu(u, v), self.Suv(u, v), self.Svv(u, v)
        hu = _step(SECOND_STEP, u)
        hv = _step(SECOND_STEP, v)
        S = self.S
        c = S(u, v)
        Suu = (S(u + hu, v) - 2 * c + S(u - hu, v)) / (hu ** 2)[..., None]
        Svv = (S(u, v + hv) - 2 * c + S(u, v - hv)) / (hv ** 2)[..., None]
        Suv = (S(u + hu, v + hv) - S(u + hu, v - hv) - S(u - hu, v + hv) + S(u - hu, v - hv)) / (
            4 * hu * hv)[..., None]
        return Suu, Suv, Svv


def _require(S: ParametricSurface, u, v):
    if not np.all(S.contains(u, v)):
        raise DomainError(f"parameter point outside the domain of surface {S.name!r}")


# -- built-in surfaces -------------------------------------------------------------


def _stack(*parts):
    parts = np.broadcast_arrays(*parts)
    return np.stack(parts, axis=-1)


def plane() -> ParametricSurface:
    """``(u, v, 0)``; normal ``+e3``."""
    z = lambda u, v: np.zeros(np.broadcast(u, v).shape)  # noqa: E731
    o = lambda u, v: np.ones(np.broadcast(u, v).shape)  # noqa: E731
    return ParametricSurface(
        S=lambda u, v: _stack(u, v, z(u, v)),
        Su=lambda u, v: _stack(o(u, v), z(u, v), z(u, v)),
        Sv=lambda u, v: _stack(z(u, v), o(u, v), z(u, v)),
        Suu=lambda u, v: _stack(z(u, v), z(u, v), z(u, v)),
        Suv=lambda u, v: _stack(z(u, v), z(u, v), z(u, v)),
        Svv=lambda u, v: _stack(z(u, v), z(u, v), z(u, v)),
        name="plane",
    )


def sphere(R=1.0) -> ParametricSurface:
    """Spherical coordinates ``u`` = polar angle in ``[0, pi]``, ``v`` = azimuth.

    The normal ``Su x Sv`` points outward, so ``L = N/sin^2 u = -R`` and ``H = -1/R``.
    """
    if not R > 0:
        raise GeometryError("sphere radius must be positive")
    R = float(R)

    def S(u, v):
        return R * _stack(np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u) + 0 * v)

    def Su(u, v):
        return R * _stack(np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), -np.sin(u) + 0 * v)

    def Sv(u, v):
        return R * _stack(-np.sin(u) * np.sin(v), np.sin(u) * np.cos(v), 0 * (u + v))

    def Suv(u, v):
        return R * _stack(-np.cos(u) * np.sin(v), np.cos(u) * np.cos(v), 0 * (u + v))

    def Svv(u, v):
        return R * _stack(-np.sin(u) * np.cos(v), -np.sin(u) * np.sin(v), 0 * (u + v))

    return ParametricSurface(S=S, Su=Su, Sv=Sv, Suu=lambda u, v: -S(u, v), Suv=Suv, Svv=Svv,
                             rect=(0.0, np.pi, 0.0, 2 * np.pi), name="sphere", params={"R": R})


def cylinder(r=1.0) -> ParametricSurface:
    """``(r cos u, r sin u, v)``; outward normal, ``H = -1/(2r)``."""
    if not r > 0:
        raise GeometryError("cylinder radius must be positive")
    r = float(r)
    zero = lambda u, v: 0 * (u + v)  # noqa: E731
    return ParametricSurface(
        S=lambda u, v: _stack(r * np.cos(u), r * np.sin(u), v + 0 * u),
        Su=lambda u, v: _stack(-r * np.sin(u), r * np.cos(u), zero(u, v)),
        Sv=lambda u, v: _stack(zero(u, v), zero(u, v), 1 + zero(u, v)),
        Suu=lambda u, v: _stack(-r * np.cos(u), -r * np.sin(u), zero(u, v)),
        Suv=lambda u, v: _stack(zero(u, v), zero(u, v), zero(u, v)),
        Svv=lambda u, v: _stack(zero(u, v), zero(u, v), zero(u, v)),
        rect=(0.0, 2 * np.pi, -np.inf, np.inf),
        name="cylinder",
        params={"r": r},
    )


def torus(R0=2.0, r=1.0) -> ParametricSurface:
    """``((R0 + r cos v) cos u, (R0 + r cos v) sin u, r sin v)`` on ``[0, 2pi]^2``.

    ``Su x Sv`` points inward here, so ``H > 0`` on the outer equator.
    """
    if not (r > 0 and R0 > r):
        raise GeometryError("torus needs R0 > r > 0")
    R0, r = float(R0), float(r)

    def S(u, v):
        w = R0 + r * np.cos(v)
        return _stack(w * np.cos(u), w * np.sin(u), r * np.sin(v) + 0 * u)

    def Su(u, v):
        w = R0 + r * np.cos(v)
        return _stack(-w * np.sin(u), w * np.cos(u), 0 * (u + v))

    def Sv(u, v):
        return _stack(-r * np.sin(v) * np.cos(u), -r * np.sin(v) * np.sin(u), r * np.cos(v) + 0 * u)

    def Suu(u, v):
        w = R0 + r * np.cos(v)
        return _stack(-w * np.cos(u), -w * np.sin(u), 0 * (u + v))

    def Suv(u, v):
        return _stack(r * np.sin(v) * np.sin(u), -r * np.sin(v) * np.cos(u), 0 * (u + v))

    def Svv(u, v):
        return _stack(-r * np.cos(v) * np.cos(u), -r * np.cos(v) * np.sin(u), -r * np.sin(v) + 0 * u)

    return ParametricSurface(S=S, Su=Su, Sv=Sv, Suu=Suu, Suv=Suv, Svv=Svv,
                             rect=(0.0, 2 * np.pi, 0.0, 2 * np.pi), name="torus",
                             params={"R0": R0, "r": r})


def graph(f, fu=None, fv=None, fuu=None, fuv=None, fvv=None, rect=None, name="graph") -> ParametricSurface:
    """Graph ``(u, v, f(u, v))``; analytic partials used when all are supplied."""

    def S(u, v):
        return _stack(u, v, f(u, v))

    kw = {}
    if fu is not None and fv is not None:
        def Su(u, v):
            z = 0 * (u + v)
            return _stack(1 + z, z, fu(u, v))

        def Sv(u, v):
            z = 0 * (u + v)
            return _stack(z, 1 + z, fv(u, v))
        kw.update(Su=Su, Sv=Sv)
    if fuu is not None and fuv is not None and fvv is not None:
        def zz(h):
            return lambda u, v: _stack(0 * (u + v), 0 * (u + v), h(u, v))
        kw.update(Suu=zz(fuu), Suv=zz(fuv), Svv=zz(fvv))
    return ParametricSurface(S=S, rect=rect, name=name, **kw)


def random_graph(seed=0, n_terms=4, amplitude=0.3) -> ParametricSurface:
    """Graph of a random trigonometric polynomial on ``[-1, 1]^2`` with analytic partials."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n_terms) * amplitude / np.sqrt(n_terms)
    p = rng.normal(size=(n_terms, 2)) * 1.5
    ph = rng.uniform(0, 2 * np.pi, size=n_terms)

    def arg(u, v):
        u = np.asarray(u, float)[..., None]
        v = np.asarray(v, float)[..., None]
        return p[:, 0] * u + p[:, 1] * v + ph

    def f(u, v):
        return np.sum(a * np.sin(arg(u, v)), axis=-1)

    def d1(k):
        return lambda u, v: np.sum(a * p[:, k] * np.cos(arg(u, v)), axis=-1)

    def d2(k, m):
        return lambda u, v: -np.sum(a * p[:, k] * p[:, m] * np.sin(arg(u, v)), axis=-1)

    S = graph(f, d1(0), d1(1), d2(0, 0), d2(0, 1), d2(1, 1), rect=(-1.0, 1.0, -1.0, 1.0),
              name="random_graph")
    return ParametricSurface(**{**S.__dict__, "params": {"seed": seed, "n_terms": n_terms,
                                                          "amplitude": amplitude}})


def tractrix_profile(x, R=1.0):
    """Height of the tractrix generating curve above radius ``x`` in ``(0, R]``.

    ``y = R log((R + sqrt(R^2 - x^2)) / x) - sqrt(R^2 - x^2)``.
    """
    x = np.asarray(x, float)
    s = np.sqrt(R * R - x * x)
    return R * np.log((R + s) / x) - s


def tractrix(R=1.0) -> ParametricSurface:
    """Surface of revolution of the tractrix: ``(R sech u cos v, R sech u sin v, R (u - tanh u))``.

    Defined for ``u > 0``; Gaussian curvature ``-1/R^2``.
    """
    if not R > 0:
        raise GeometryError("tractrix parameter must be positive")
    R = float(R)

    def S(u, v):
        s = 1 / np.cosh(u)
        return _stack(R * s * np.cos(v), R * s * np.sin(v), R * (u - np.tanh(u)) + 0 * v)

    def Su(u, v):
        s, t = 1 / np.cosh(u), np.tanh(u)
        return _stack(-R * s * t * np.cos(v), -R * s * t * np.sin(v), R * t * t + 0 * v)

    def Sv(u, v):
        s = 1 / np.cosh(u)
        return _stack(-R * s * np.sin(v), R * s * np.cos(v), 0 * (u + v))

    def Suu(u, v):
        s, t = 1 / np.cosh(u), np.tanh(u)
        w = R * s * (t * t - s * s)
        return _stack(w * np.cos(v), w * np.sin(v), 2 * R * t * s * s + 0 * v)

    def Suv(u, v):
        s, t = 1 / np.cosh(u), np.tanh(u)
        return _stack(R * s * t * np.sin(v), -R * s * t * np.cos(v), 0 * (u + v))

    def Svv(u, v):
        s = 1 / np.cosh(u)
        return _stack(-R * s * np.cos(v), -R * s * np.sin(v), 0 * (u + v))

    return ParametricSurface(S=S, Su=Su, Sv=Sv, Suu=Suu, Suv=Suv, Svv=Svv,
                             rect=(0.0, np.inf, -np.inf, np.inf),
                             in_domain=lambda u, v: u > 0, name="tractrix", params={"R": R})


SURFACE_NAMES = ("plane", "sphere", "cylinder", "torus", "random_graph", "tractrix")


def make_surface(name: str, **params) -> ParametricSurface:
    """Built-in surface by registry name."""
    builders = {"plane": plane, "sphere": sphere, "cylinder": cylinder, "torus": torus,
                "random_graph": random_graph, "tractrix": tractrix}
    if name not in builders:
        raise GeometryError(f"unknown surface {name!r}; choose from {', '.join(SURFACE_NAMES)}")
    if name == "random_graph" and "seed" in params:
        params["seed"] = int(params["seed"])
    try:
        return builders[name](**params)
    except TypeError as exc:
        raise GeometryError(f"bad parameters for surface {name!r}: {exc}") from exc


# -- fundamental forms --------------------------------------------------------------


@dataclass(frozen=True)
class FundamentalForms:
    """First form ``E, F, G``, second form ``L, M, N`` and the unit normal.

    Fields are scalars for scalar ``(u, v)`` and arrays for batched input.
    """

    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    normal: np.ndarray

    def flipped(self) -> "FundamentalForms":
        """Same forms with the opposite unit normal."""
        return FundamentalForms(self.E, self.F, self.G, -self.L, -self.M, -self.N, -self.normal)


def _forms(S, u, v):
    Su, Sv = S.first_partials(u, v)
    Suu, Suv, Svv = S.second_partials(u, v)
    cr = np.cross(Su, Sv)
    nrm = np.linalg.norm(cr, axis=-1)
    if np.any(nrm < DEGENERATE_TOL):
        raise DegenerateError("degenerate parameterization: Su x Sv vanishes")
    n = cr / nrm[..., None]
    dot = lambda a, b: np.sum(a * b, axis=-1)  # noqa: E731
    return dict(Su=Su, Sv=Sv, Suu=Suu, Suv=Suv, Svv=Svv, n=n,
                E=dot(Su, Su), F=dot(Su, Sv), G=dot(Sv, Sv),
                L=dot(Suu, n), M=dot(Suv, n), N=dot(Svv, n))


def _squeeze(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def fundamental_forms(S: ParametricSurface, u, v) -> FundamentalForms:
    """``E = <Su,Su>, F = <Su,Sv>, G = <Sv,Sv>`` and ``L, M, N`` against ``n = Su x Sv / |Su x Sv|``.

    Raises
    ------
    DegenerateError
        If ``|Su x Sv| < 1e-12``.
    """
    _require(S, u, v)
    f = _forms(S, u, v)
    return FundamentalForms(*(_squeeze(f[k]) for k in "EFGLMN"), normal=f["n"])


@dataclass(frozen=True)
class SurfaceCurvatures:
    K_extrinsic: np.ndarray
    K_intrinsic: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray

    def __iter__(self):
        return iter((self.K_extrinsic, self.K_intrinsic, self.k1, self.k2, self.H))


def _first_form_with_derivatives(S, u, v):
    """``E, F, G`` and their u/v derivatives from the analytic (or differenced) partials."""
    Su, Sv = S.first_partials(u, v)
    Suu, Suv, Svv = S.second_partials(u, v)
    dot = lambda a, b: np.sum(a * b, axis=-1)  # noqa: E731
    E, F, G = dot(Su, Su), dot(Su, Sv), dot(Sv, Sv)
    Eu, Ev = 2 * dot(Su, Suu), 2 * dot(Su, Suv)
    Fu, Fv = dot(Suu, Sv) + dot(Su, Suv), dot(Suv, Sv) + dot(Su, Svv)
    Gu, Gv = 2 * dot(Sv, Suv), 2 * dot(Sv, Svv)
    return E, F, G, Eu, Ev, Fu, Fv, Gu, Gv


def _christoffel_surface(E, F, G, Eu, Ev, Fu, Fv, Gu, Gv):
    """All six Christoffel symbols of the first form, as ``{(k, i, j): value}`` (1-based)."""
    W = E * G - F * F
    return {
        (1, 1, 1): (G * Eu - 2 * F * Fu + F * Ev) / (2 * W),
        (2, 1, 1): (2 * E * Fu - E * Ev - F * Eu) / (2 * W),
        (1, 1, 2): (G * Ev - F * Gu) / (2 * W),
        (2, 1, 2): (E * Gu - F * Ev) / (2 * W),
        (1, 2, 2): (2 * G * Fv - G * Gu - F * Gv) / (2 * W),
        (2, 2, 2): (E * Gv - 2 * F * Fv + F * Gu) / (2 * W),
    }


def _intrinsic_K(S, u, v):
    """Gaussian curvature from ``E, F, G`` alone.

    ``K = W^{-1/2} [d/du (W^{1/2}/G Gamma^1_22) - d/dv (W^{1/2}/G Gamma^1_12)]``,
    ``W = EG - F^2``; outer derivatives by the fourth-order central stencil.
    """

    def terms(uu, vv):
        E, F, G, Eu, Ev, Fu, Fv, Gu, Gv = _first_form_with_derivatives(S, uu, vv)
        W = E * G - F * F
        gam = _christoffel_surface(E, F, G, Eu, Ev, Fu, Fv, Gu, Gv)
        rw = np.sqrt(W) / G
        return rw * gam[(1, 2, 2)], rw * gam[(1, 1, 2)]

    hu = _step(OUTER_STEP, u)
    hv = _step(OUTER_STEP, v)
    c = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
    offs = (-2, -1, 1, 2)
    du = sum(ck * terms(u + o * hu, v)[0] for ck, o in zip(c, offs)) / hu
    dv = sum(ck * terms(u, v + o * hv)[1] for ck, o in zip(c, offs)) / hv
    E, F, G = _first_form_with_derivatives(S, u, v)[:3]
    return (du - dv) / np.sqrt(E * G - F * F)


def curvatures(S: ParametricSurface, u, v) -> SurfaceCurvatures:
    """Extrinsic and intrinsic Gaussian curvature, principal curvatures and mean curvature.

    ``K_extrinsic = (LN - M^2)/(EG - F^2)``; ``K_intrinsic`` uses only the first
    form.  ``k1 >= k2`` are the eigenvalues of the shape matrix ``I^{-1} II`` and
    ``H = (k1 + k2)/2``; their signs follow the normal ``Su x Sv``.
    """
    _require(S, u, v)
    f = _forms(S, u, v)
    E, F, G, L, M, N = (f[k] for k in "EFGLMN")
    W = E * G - F * F
    K = (L * N - M * M) / W
    H = (E * N - 2 * F * M + G * L) / (2 * W)
    disc = np.sqrt(np.maximum(H * H - K, 0.0))
    Ki = _intrinsic_K(S, np.asarray(u, float), np.asarray(v, float))
    return SurfaceCurvatures(*(_squeeze(x) for x in (K, Ki, H + disc, H - disc, H)))


def shape_matrix(S: ParametricSurface, u, v) -> np.ndarray:
    """Weingarten matrix ``I^{-1} II`` (shape ``(..., 2, 2)``)."""
    _require(S, u, v)
    f = _forms(S, u, v)
    I = np.stack([np.stack([f["E"], f["F"]], -1), np.stack([f["F"], f["G"]], -1)], -2)
    II = np.stack([np.stack([f["L"], f["M"]], -1), np.stack([f["M"], f["N"]], -1)], -2)
    return np.linalg.solve(I, II)


def codazzi_residuals(S: ParametricSurface, u, v):
    """Residuals of the two Codazzi equations at ``(u, v)``.

    ``r1 = (L_v - M_u) - (G112 L + (G212 - G111) M - G211 N)`` and
    ``r2 = (M_v - N_u) - (G122 L + (G222 - G112) M - G212 N)``, with
    ``Gkij = Gamma^k_ij``.  ``L_v, M_u, M_v, N_u`` come from central
    differences of the second fundamental form.
    """
    _require(S, u, v)
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    hu = _step(OUTER_STEP, u)
    hv = _step(OUTER_STEP, v)
    c = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
    offs = (-2, -1, 1, 2)

    def second(uu, vv):
        f = _forms(S, uu, vv)
        return f["L"], f["M"], f["N"]

    LMN_u = [sum(ck * second(u + o * hu, v)[i] for ck, o in zip(c, offs)) / hu for i in range(3)]
    LMN_v = [sum(ck * second(u, v + o * hv)[i] for ck, o in zip(c, offs)) / hv for i in range(3)]
    L, M, N = second(u, v)
    g = _christoffel_surface(*_first_form_with_derivatives(S, u, v))
    r1 = (LMN_v[0] - LMN_u[1]) - (g[1, 1, 2] * L + (g[2, 1, 2] - g[1, 1, 1]) * M - g[2, 1, 1] * N)
    r2 = (LMN_v[1] - LMN_u[2]) - (g[1, 2, 2] * L + (g[2, 2, 2] - g[1, 1, 2]) * M - g[2, 1, 2] * N)
    return _squeeze(r1), _squeeze(r2)


def induced_metric(S: ParametricSurface) -> ChartMetric:
    """Two-dimensional chart metric ``[[E, F], [F, G]]`` pulled back from ``S``."""

    def g(x):
        x = np.asarray(x, float)
        E, F, G = _first_form_with_derivatives(S, x[..., 0], x[..., 1])[:3]
        return np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)

    def dg(x):
        x = np.asarray(x, float)
        _, _, _, Eu, Ev, Fu, Fv, Gu, Gv = _first_form_with_derivatives(S, x[..., 0], x[..., 1])
        du = np.stack([np.stack([Eu, Fu], -1), np.stack([Fu, Gu], -1)], -2)
        dv = np.stack([np.stack([Ev, Fv], -1), np.stack([Fv, Gv], -1)], -2)
        return np.stack([du, dv], -3)

    def inside(x):
        x = np.asarray(x, float)
        return S.contains(x[..., 0], x[..., 1])

    return ChartMetric(dim=2, g=g, dg=dg, in_domain=inside, name=f"induced:{S.name}",
                       params=dict(S.params))


def surface_area(S: ParametricSurface, u0, u1, v0, v1, n=64) -> float:
    """``integral sqrt(EG - F^2) du dv`` over a parameter rectangle (Gauss-Legendre, ``n x n``)."""
    xg, wg = np.polynomial.legendre.leggauss(n)
    uu = 0.5 * (u1 - u0) * xg + 0.5 * (u1 + u0)
    vv = 0.5 * (v1 - v0) * xg + 0.5 * (v1 + v0)
    U, V = np.meshgrid(uu, vv, indexing="ij")
    E, F, G = _first_form_with_derivatives(S, U, V)[:3]
    w = np.outer(wg, wg) * 0.25 * (u1 - u0) * (v1 - v0)
    return float(np.sum(w * np.sqrt(E * G - F * F)))
