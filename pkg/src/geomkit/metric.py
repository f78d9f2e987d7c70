"""Metrics on a single coordinate chart, curve length/energy and inner products.

All evaluators are *batched*: a chart point is an array of shape ``(..., dim)``
and the metric evaluator returns ``(..., dim, dim)``.  Derivative evaluators
return ``(..., dim, dim, dim)`` with the differentiation index first, i.e.
``dg[..., k, i, j] = d g_ij / d x_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import DomainError, SignatureError, SingularMetricError, DegenerateError

__all__ = [
    "ChartMetric",
    "CurvePath",
    "metric_at",
    "curve_measures",
    "inner_product",
    "simpson",
]

SYMMETRY_TOL = 1e-12


def _loop_batched(fn, dim, out_tail):
    """Wrap a single-point evaluator so it accepts ``(..., dim)`` input."""

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, dim)
        out = np.stack([np.asarray(fn(p), dtype=float) for p in flat])
        return out.reshape(x.shape[:-1] + out_tail)

    return wrapped


def _always_inside(x):
    return np.ones(np.shape(x)[:-1], dtype=bool)


@dataclass(frozen=True)
class ChartMetric:
    """A metric tensor on one coordinate chart.

    Parameters
    ----------
    dim : int
        Chart dimension.
    g : callable
        ``g(x) -> (..., dim, dim)`` metric matrices.
    dg : callable, optional
        ``dg(x) -> (..., dim, dim, dim)`` with ``dg[..., k, i, j] = d_k g_ij``.
        Central differences are used when omitted.
    in_domain : callable, optional
        ``in_domain(x) -> bool array``; defaults to the whole of R^dim.
    signature : {"riemannian", "lorentzian"}
    vectorized : bool
        Set to False when ``g``/``dg``/``in_domain`` only handle a single point;
        they are then wrapped in a Python loop.
    name : str
        Label used in reports.
    christoffel : callable, optional
        ``christoffel(x) -> (..., dim, dim, dim)`` analytic Christoffel symbols
        ``G[..., k, i, j]``; must agree with ``g`` and ``dg``.  Only a speed-up.
    """

    dim: int
    g: Callable
    dg: Optional[Callable] = None
    in_domain: Optional[Callable] = None
    signature: str = "riemannian"
    vectorized: bool = True
    name: str = "custom"
    params: dict = field(default_factory=dict)
    christoffel: Optional[Callable] = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if self.signature not in ("riemannian", "lorentzian"):
            raise ValueError(f"unknown signature {self.signature!r}")
        if not self.vectorized:
            d = self.dim
            object.__setattr__(self, "g", _loop_batched(self.g, d, (d, d)))
            if self.dg is not None:
                object.__setattr__(self, "dg", _loop_batched(self.dg, d, (d, d, d)))
            if self.in_domain is not None:
                inner = self.in_domain
                object.__setattr__(
                    self,
                    "in_domain",
                    lambda x: np.array(
                        [bool(inner(p)) for p in np.asarray(x, float).reshape(-1, d)]
                    ).reshape(np.shape(x)[:-1]),
                )
            object.__setattr__(self, "vectorized", True)
        if self.in_domain is None:
            object.__setattr__(self, "in_domain", _always_inside)

    # -- raw batched evaluation (no validation; used in hot loops) ---------

    def metric(self, x):
        """Symmetrized metric at ``x`` without validation."""
        g = np.asarray(self.g(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (g + np.swapaxes(g, -1, -2))

    def metric_derivative(self, x):
        """``d_k g_ij`` at ``x``, analytic when available."""
        x = np.asarray(x, dtype=float)
        if self.dg is not None:
            dg = np.asarray(self.dg(x), dtype=float)
            return 0.5 * (dg + np.swapaxes(dg, -1, -2))
        return self._fd_metric_derivative(x)

    def _fd_metric_derivative(self, x):
        # h_i = max(1e-5, 1e-5 |x_i|)
        d = self.dim
        out = np.empty(x.shape[:-1] + (d, d, d))
        for k in range(d):
            h = np.maximum(1e-5, 1e-5 * np.abs(x[..., k]))
            xp = x.copy()
            xm = x.copy()
            xp[..., k] += h
            xm[..., k] -= h
            out[..., k, :, :] = (self.metric(xp) - self.metric(xm)) / (2.0 * h)[..., None, None]
        return out

    def contains(self, x):
        return np.asarray(self.in_domain(np.asarray(x, dtype=float)), dtype=bool)

    def scaled(self, lam):
        """The metric multiplied by ``lam**2`` (distances scale by ``lam``)."""
        s = float(lam) ** 2
        g, dg = self.g, self.dg
        return ChartMetric(
            dim=self.dim,
            g=lambda x: s * np.asarray(g(x)),
            dg=None if dg is None else (lambda x: s * np.asarray(dg(x))),
            in_domain=self.in_domain,
            signature=self.signature,
            name=f"{self.name}*{lam}^2",
            params=dict(self.params),
            christoffel=self.christoffel,
        )

    def without_derivative(self):
        """Copy of this metric that falls back to finite-difference derivatives."""
        return ChartMetric(
            dim=self.dim, g=self.g, dg=None, in_domain=self.in_domain,
            signature=self.signature, name=self.name, params=dict(self.params),
        )


def _as_point(M, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (M.dim,):
        raise ValueError(f"expected chart point(s) of dimension {M.dim}, got shape {x.shape}")
    return x


def require_domain(M, x, what="point"):
    if not np.all(M.contains(x)):
        raise DomainError(f"{what} outside the domain of metric {M.name!r}")


def metric_at(M: ChartMetric, x) -> np.ndarray:
    """Validated metric matrix at one or more chart points.

    Raises
    ------
    DomainError
        If any point lies outside the chart.
    SingularMetricError
        If the raw evaluator is not symmetric to within 1e-12.
    SignatureError
        If the eigenvalue signs disagree with ``M.signature``.
    """
    x = _as_point(M, x)
    require_domain(M, x)
    raw = np.asarray(M.g(x), dtype=float)
    asym = np.max(np.abs(raw - np.swapaxes(raw, -1, -2)), initial=0.0)
    if asym > SYMMETRY_TOL * max(1.0, np.max(np.abs(raw), initial=0.0)):
        raise SingularMetricError(f"metric is not symmetric (max asymmetry {asym:.3e})")
    g = 0.5 * (raw + np.swapaxes(raw, -1, -2))
    eig = np.linalg.eigvalsh(g)
    neg = np.sum(eig < 0, axis=-1)
    zero = np.any(eig == 0, axis=-1)
    if np.any(zero):
        raise SingularMetricError("metric is singular")
    if M.signature == "riemannian" and np.any(neg != 0):
        raise SignatureError("riemannian metric is not positive definite")
    if M.signature == "lorentzian" and np.any(neg != 1):
        raise SignatureError("lorentzian metric must have exactly one negative eigenvalue")
    return g


def inner_product(M: ChartMetric, x, xi, eta):
    """Return ``(value, angle)`` for two tangent vectors at ``x``.

    ``angle`` is None when either vector has zero length.
    """
    x = _as_point(M, x)
    require_domain(M, x)
    g = M.metric(x)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    value = float(xi @ g @ eta)
    n1 = float(xi @ g @ xi)
    n2 = float(eta @ g @ eta)
    if n1 <= 0.0 or n2 <= 0.0:
        return value, None
    cos = np.clip(value / np.sqrt(n1 * n2), -1.0, 1.0)
    return value, float(np.arccos(cos))


# -- curves ----------------------------------------------------------------


class CurvePath:
    """A parameterized curve in chart coordinates on ``[t0, t1]``.

    Build it from callables (``point(t)`` and ``velocity(t)``, both accepting
    arrays of ``t``) or from uniformly spaced samples with :meth:`from_samples`.
    """

    def __init__(self, point, velocity, t0, t1):
        if not t1 > t0:
            raise DegenerateError("curve parameter interval must have t1 > t0")
        self.point = point
        self.velocity = velocity
        self.t0 = float(t0)
        self.t1 = float(t1)

    @classmethod
    def from_samples(cls, points, h=1.0):
        """Cubic-spline curve through uniformly spaced samples (spacing ``h``)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or len(pts) < 2:
            raise DegenerateError("a sampled curve needs at least 2 points")
        t = h * np.arange(len(pts))
        if len(pts) == 2:
            slope = (pts[1] - pts[0]) / h
            return cls(
                lambda s: pts[0] + (np.asarray(s, float)[..., None] - t[0]) * slope,
                lambda s: np.broadcast_to(slope, np.shape(s) + slope.shape).copy(),
                t[0], t[-1],
            )
        spline = CubicSpline(t, pts, axis=0)
        return cls(spline, spline.derivative(), t[0], t[-1])

    @classmethod
    def from_hermite(cls, t, points, velocities):
        """Piecewise-cubic curve matching positions and velocities at ``t``."""
        spline = CubicHermiteSpline(np.asarray(t, float), np.asarray(points, float),
                                    np.asarray(velocities, float), axis=0)
        return cls(spline, spline.derivative(), t[0], t[-1])

    @classmethod
    def segment(cls, p, q, t0=0.0, t1=1.0):
        """Straight chart segment from ``p`` to ``q``."""
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        v = (q - p) / (t1 - t0)
        return cls(
            lambda s: p + (np.asarray(s, float)[..., None] - t0) * v,
            lambda s: np.broadcast_to(v, np.shape(s) + v.shape).copy(),
            t0, t1,
        )

    def reparameterized(self, phi, dphi, s0, s1):
        """The curve ``c(phi(s))`` for an increasing map ``phi: [s0,s1] -> [t0,t1]``."""
        point, velocity = self.point, self.velocity
        return CurvePath(
            lambda s: point(phi(np.asarray(s, float))),
            lambda s: velocity(phi(np.asarray(s, float))) * np.asarray(dphi(np.asarray(s, float)))[..., None],
            s0, s1,
        )


def simpson(f, a, b, n):
    """Composite Simpson rule with ``n`` (even) panels for a vectorized ``f``."""
    if n % 2:
        n += 1
    t = np.linspace(a, b, n + 1)
    y = f(t)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((b - a) / (3.0 * n) * np.dot(w, y))


def _check_curve(M, c, n=257):
    t = np.linspace(c.t0, c.t1, n)
    if not np.all(M.contains(c.point(t))):
        raise DomainError("curve leaves the chart domain")


def curve_measures(M: ChartMetric, c: CurvePath, rtol=1e-10, n0=2048, nmax=2 ** 20):
    """Length and energy of a curve.

    Composite Simpson quadrature starting from ``n0`` panels and doubling
    until successive estimates agree to ``rtol`` (relative) or ``nmax`` is hit.

    Returns
    -------
    (length, energy) : tuple of float
    """
    if M.signature != "riemannian":
        raise SignatureError("length and energy need a riemannian metric")
    _check_curve(M, c)

    def quad_form(t):
        x = c.point(t)
        v = c.velocity(t)
        q = np.einsum("...i,...ij,...j->...", v, M.metric(x), v)
        if np.any(q < -1e-12 * np.maximum(1.0, np.abs(q).max())):
            raise SignatureError("negative quadratic form along the curve")
        return np.maximum(q, 0.0)

    def both(n):
        if n % 2:
            n += 1
        t = np.linspace(c.t0, c.t1, n + 1)
        q = quad_form(t)
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        scale = (c.t1 - c.t0) / (3.0 * n)
        return scale * np.dot(w, np.sqrt(q)), scale * np.dot(w, q)

    n = n0
    length, energy = both(n)
    while n < nmax:
        n *= 2
        l2, e2 = both(n)
        done = abs(l2 - length) <= rtol * max(abs(l2), 1e-300) and abs(e2 - energy) <= rtol * max(abs(e2), 1e-300)
        length, energy = l2, e2
        if done:
            break
    return float(length), float(energy)
