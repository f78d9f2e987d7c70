"""Levi-Civita connection: Christoffel symbols, parallel transport and geodesics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError, DegenerateError, DomainError, SignatureError, SingularMetricError
from .metric import ChartMetric, CurvePath, curve_measures, require_domain

__all__ = [
    "christoffel",
    "GeodesicSolution",
    "Diagnostics",
    "geodesic_ivp",
    "geodesic_bvp",
    "parallel_transport",
    "transport_frame",
    "covariant_derivative",
    "sample_linear_transport",
]

DEFAULT_STEPS = 4096


def _inverse(g):
    if g.shape[-1] == 2:
        a, b, d = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
        det = a * d - b * b
        inv = np.empty_like(g)
        inv[..., 0, 0] = d / det
        inv[..., 1, 1] = a / det
        inv[..., 0, 1] = inv[..., 1, 0] = -b / det
        return inv
    return np.linalg.inv(g)


def _gamma(M: ChartMetric, x):
    """Christoffel symbols ``G[..., k, i, j]`` without validation."""
    if M.christoffel is not None:
        return np.asarray(M.christoffel(np.asarray(x, dtype=float)), dtype=float)
    g = M.metric(x)
    dg = M.metric_derivative(x)
    d = g.shape[-1]
    # lowered[a, i, j] = 1/2 (d_j g_ia + d_i g_ja - d_a g_ij)
    q = np.swapaxes(dg, -3, -2)
    lowered = 0.5 * (q + np.swapaxes(q, -1, -2) - dg)
    flat = lowered.reshape(lowered.shape[:-2] + (d * d,))
    gam = (_inverse(g) @ flat).reshape(lowered.shape)
    return 0.5 * (gam + np.swapaxes(gam, -1, -2))


def christoffel(M: ChartMetric, x) -> np.ndarray:
    """Christoffel symbols of the second kind, ``G[k, i, j]`` = {k; i j}.

    Accepts a single point or a batch ``(..., dim)``.  The result is
    symmetric in ``(i, j)`` exactly.
    """
    x = np.asarray(x, dtype=float)
    require_domain(M, x)
    g = M.metric(x)
    det = np.linalg.det(g)
    scale = np.prod(np.abs(np.diagonal(g, axis1=-2, axis2=-1)), axis=-1)
    if np.any(np.abs(det) <= 1e-14 * np.maximum(scale, 1e-300)):
        raise SingularMetricError("metric is singular; Christoffel symbols undefined")
    return _gamma(M, x)


def covariant_derivative(M: ChartMetric, x, velocity, X, dX):
    """``DX/dt = dX/dt + G(velocity, X)`` for a field ``X`` along a curve."""
    gam = _gamma(M, np.asarray(x, float))
    return np.asarray(dX, float) + np.einsum("...kij,...i,...j->...k", gam, velocity, X)


@dataclass
class Diagnostics:
    """Solver diagnostics attached to a :class:`GeodesicSolution`."""

    speed_drift: float = 0.0
    max_residual: float = 0.0
    exited_domain: bool = False
    converged: bool = True
    flagged: bool = False
    method: str = "rk4"
    iterations: int = 0
    notes: list = field(default_factory=list)


@dataclass
class GeodesicSolution:
    """Sampled geodesic: parameter ``t``, positions ``x``, velocities ``v``, arc length ``s``."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    s: np.ndarray
    step: float
    diagnostics: Diagnostics

    @property
    def arc_length(self) -> float:
        return float(self.s[-1])

    @property
    def endpoint(self) -> np.ndarray:
        return self.x[-1]

    @property
    def start(self) -> np.ndarray:
        return self.x[0]

    def as_curve(self) -> CurvePath:
        """Piecewise cubic Hermite interpolant of the samples."""
        return CurvePath.from_hermite(self.t, self.x, self.v)

    def table(self) -> np.ndarray:
        """Rows ``t, x_1..x_d, v_1..v_d, s``."""
        return np.column_stack([self.t, self.x, self.v, self.s])

    def csv_header(self) -> list:
        d = self.x.shape[1]
        return ["t"] + [f"x_{i + 1}" for i in range(d)] + [f"v_{i + 1}" for i in range(d)] + ["s"]


def _speed2(M, x, v):
    return np.einsum("...i,...ij,...j->...", v, M.metric(x), v)


def _accel(M, x, v):
    gv = (_gamma(M, x) @ v[..., None, :, None])[..., 0]
    return -np.sum(gv * v[..., None, :], axis=-1)


def _rk4_geodesic(M, p, xi, T, n):
    """Fixed-step RK4 for a batch of geodesics.

    ``p`` and ``xi`` have shape ``(m, dim)``.  Returns ``(t, X, V, k)`` where
    ``X, V`` have shape ``(k+1, m, dim)`` and ``k <= n`` is the number of
    completed steps (smaller if any trajectory left the domain).
    """
    h = T / n
    m, d = p.shape
    X = np.empty((n + 1, m, d))
    V = np.empty((n + 1, m, d))
    X[0], V[0] = p, xi
    x, v = p.copy(), xi.copy()
    contains = M.contains
    done = n
    for i in range(n):
        k1x, k1v = v, _accel(M, x, v)
        x2 = x + 0.5 * h * k1x
        v2 = v + 0.5 * h * k1v
        if not np.all(contains(x2)):
            done = i
            break
        k2x, k2v = v2, _accel(M, x2, v2)
        x3 = x + 0.5 * h * k2x
        v3 = v + 0.5 * h * k2v
        if not np.all(contains(x3)):
            done = i
            break
        k3x, k3v = v3, _accel(M, x3, v3)
        x4 = x + h * k3x
        v4 = v + h * k3v
        if not np.all(contains(x4)):
            done = i
            break
        k4x, k4v = v4, _accel(M, x4, v4)
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (np.all(np.isfinite(x)) and np.all(contains(x))):
            done = i
            break
        X[i + 1], V[i + 1] = x, v
    t = h * np.arange(done + 1)
    return t, X[: done + 1], V[: done + 1], done


def _arc_length(M, t, x, v):
    speed = np.sqrt(np.maximum(_speed2(M, x, v), 0.0))
    s = np.zeros_like(t)
    if len(t) > 1:
        s[1:] = np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(t))
    return s, speed


def _solution(M, t, x, v, h, diag):
    s, speed = _arc_length(M, t, x, v)
    q = speed ** 2
    q0 = q[0]
    diag.speed_drift = float(np.max(np.abs(q - q0)) / q0) if q0 > 0 else 0.0
    return GeodesicSolution(t=t, x=x, v=v, s=s, step=h, diagnostics=diag)


def geodesic_ivp(M: ChartMetric, p, xi, T, step=None, drift_tol=1e-8, max_halvings=3):
    """Integrate the geodesic equation from ``p`` with initial velocity ``xi`` on ``[0, T]``.

    Classical RK4 with a fixed step (default ``T/4096``); the step is halved
    while the relative drift of ``g(v, v)`` exceeds ``drift_tol``.  If the
    solution leaves the chart the samples are clipped to the last in-domain
    point and ``diagnostics.exited_domain`` is set.
    """
    if M.signature != "riemannian":
        raise SignatureError("geodesic integration needs a riemannian metric")
    p = np.asarray(p, dtype=float)
    xi = np.asarray(xi, dtype=float)
    require_domain(M, p, "initial point")
    if not np.all(np.isfinite(xi)):
        raise DegenerateError("initial velocity must be finite")
    if not T > 0:
        raise DegenerateError("integration time must be positive")
    n = DEFAULT_STEPS if step is None else max(1, int(math.ceil(T / step - 1e-9)))
    for halving in range(max_halvings + 1):
        t, X, V, done = _rk4_geodesic(M, p[None], xi[None], T, n)
        diag = Diagnostics(method="rk4", exited_domain=done < n)
        sol = _solution(M, t, X[:, 0], V[:, 0], T / n, diag)
        if sol.diagnostics.speed_drift <= drift_tol or diag.exited_domain:
            break
        if halving < max_halvings:
            n *= 2
    if diag.exited_domain:
        diag.notes.append(f"left the domain at t={sol.t[-1]:.6g}; samples clipped")
    if sol.diagnostics.speed_drift > drift_tol:
        diag.notes.append(f"speed drift {sol.diagnostics.speed_drift:.2e} above {drift_tol:.0e}")
    return sol


# -- boundary value problem ----------------------------------------------------


def _shoot(M, p, xis, n):
    """Endpoints of geodesics from ``p`` with velocities ``xis`` over [0, 1]."""
    m = len(xis)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        t, X, V, done = _rk4_geodesic(M, np.repeat(p[None], m, axis=0), xis, 1.0, n)
    return X, V, done == n


def _jacobian(M, p, xi, n):
    d = len(p)
    delta = 1e-7 * max(1.0, float(np.linalg.norm(xi)))
    X, V, ok = _shoot(M, p, np.vstack([xi[None], xi[None] + delta * np.eye(d)]), n)
    if not ok:
        return None, None
    return (X[-1, 1:] - X[-1, 0]).T / delta, (X[:, 0], V[:, 0])


def _newton(M, p, q, xi, n, tol, max_iter, J=None):
    """Damped (chord) Newton iteration on the shooting residual.

    Reuses ``J`` while it keeps halving the residual, otherwise rebuilds it by
    forward differences.  Returns ``(xi, residual, iterations, J, last_shot)``.
    """
    scale = max(1.0, float(np.max(np.abs(q))))
    X, V, ok = _shoot(M, p, xi[None], n)
    if not ok:
        return xi, math.inf, 0, J, None
    shot = (X[:, 0], V[:, 0])
    rnorm = float(np.linalg.norm(X[-1, 0] - q))
    it = 0
    fresh = False
    while rnorm > tol * scale and it < max_iter:
        it += 1
        if J is None:
            J, _ = _jacobian(M, p, xi, n)
            fresh = True
            if J is None:
                break
        try:
            step = np.linalg.solve(J, q - shot[0][-1])
        except np.linalg.LinAlgError:
            if fresh:
                break
            J = None
            continue
        # trust region: never move further than the current velocity size
        cap = max(float(np.linalg.norm(xi)), float(np.linalg.norm(q - p)))
        lam = min(1.0, cap / max(float(np.linalg.norm(step)), 1e-300))
        improved = False
        for _ in range(12):
            cand = xi + lam * step
            Xc, Vc, okc = _shoot(M, p, cand[None], n)
            if okc:
                rc = float(np.linalg.norm(Xc[-1, 0] - q))
                if rc < rnorm:
                    improved = True
                    slow = rc > 0.1 * rnorm
                    xi, rnorm, shot = cand, rc, (Xc[:, 0], Vc[:, 0])
                    break
            lam *= 0.5
        if not improved or slow:
            if fresh and not improved:
                break
            J = None
            fresh = False
        else:
            fresh = False
    return xi, rnorm, it, J, shot


def _energy_descent(M, p, q, n_points=64):
    """Minimize the discrete energy of a polyline from p to q; return the initial velocity."""
    d = len(p)
    k = n_points - 1
    s = np.linspace(0.0, 1.0, n_points)[1:-1, None]
    interior0 = (1.0 - s) * p + s * q

    def energy(flat):
        pts = np.vstack([p, flat.reshape(-1, d), q])
        if not np.all(M.contains(pts)):
            return 1e300, np.zeros_like(flat)
        mid = 0.5 * (pts[1:] + pts[:-1])
        dx = np.diff(pts, axis=0)
        g = M.metric(mid)
        dg = M.metric_derivative(mid)
        e = k * np.einsum("ni,nij,nj->", dx, g, dx)
        # gradient with respect to each interior point
        gdx = np.einsum("nij,nj->ni", g, dx)
        quad = 0.5 * k * np.einsum("ni,nkij,nj->nk", dx, dg, dx)
        grad_seg_right = 2 * k * gdx  # d/d pts[n+1]
        grad = np.zeros_like(pts)
        grad[1:] += grad_seg_right + quad
        grad[:-1] += -grad_seg_right + quad
        return float(e), grad[1:-1].ravel()

    # BFGS copes with the out-of-domain penalty better than L-BFGS-B
    result = minimize(energy, interior0.ravel(), jac=True, method="BFGS",
                      options={"maxiter": 5000, "gtol": 1e-9})
    pts = np.vstack([p, result.x.reshape(-1, d), q])
    return (pts[1] - pts[0]) * k, float(result.fun)


def _straight_length(M, p, q):
    if not np.all(M.contains(np.linspace(0, 1, 257)[:, None] * (q - p) + p)):
        return math.inf
    return curve_measures(M, CurvePath.segment(p, q))[0]


def geodesic_bvp(M: ChartMetric, p, q, n_final=512, tol=1e-10, max_iter=40):
    """Geodesic joining ``p`` to ``q`` by shooting, with an energy-descent fallback.

    The geodesic is parameterized on ``[0, 1]`` (constant speed equal to the
    distance).  Newton iterations run on a coarse RK4 grid and are polished
    on ``n_final`` steps.  ``diagnostics.flagged`` is set when the result is
    longer than the straight chart segment (a non-minimizing branch, e.g.
    beyond a cut point) or when the fallback was needed.

    Returns
    -------
    (GeodesicSolution, distance)
    """
    if M.signature != "riemannian":
        raise SignatureError("distances need a riemannian metric")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    require_domain(M, np.stack([p, q]), "endpoint")
    d = len(p)
    if np.allclose(p, q, rtol=0, atol=1e-15):
        t = np.array([0.0, 1.0])
        x = np.stack([p, p])
        sol = GeodesicSolution(t, x, np.zeros((2, d)), np.zeros(2), 1.0, Diagnostics(method="trivial"))
        return sol, 0.0

    scale = max(1.0, float(np.max(np.abs(q))))
    stages = [n for n in (64,) if n < n_final] + [n_final]

    def solve(xi, J=None):
        shot, r, iters = None, math.inf, 0
        for n in stages:
            stage_tol = tol if n == n_final else 1e-8
            xi, r, it, J, shot = _newton(M, p, q, xi, n, stage_tol, max_iter, J)
            iters += it
            if not math.isfinite(r):
                break
        return xi, r, iters, shot

    notes = []
    xi_best, r_best, iters, shot = solve(q - p)
    used_fallback = False
    straight = _straight_length(M, p, q)
    converged = r_best <= tol * scale
    if not converged or math.sqrt(_speed2(M, p, xi_best)) > straight * (1 + 1e-9):
        used_fallback = True
        if converged:
            notes.append("shooting found a non-minimizing branch; energy descent restart")
        else:
            notes.append(f"shooting stalled (residual {r_best:.2e}); energy descent fallback")
        xi0, _ = _energy_descent(M, p, q)
        xi2, r2, more, shot2 = solve(xi0)
        iters += more
        ok2 = shot2 is not None and r2 <= 100 * tol * scale
        if ok2 and (not converged or _speed2(M, p, xi2) < _speed2(M, p, xi_best)):
            xi_best, r_best, shot = xi2, r2, shot2
        elif not converged:
            raise ConvergenceError(
                f"geodesic_bvp did not converge (best endpoint residual {min(r_best, r2):.3e})",
                best=xi_best if r_best <= r2 else xi2, residual=min(r_best, r2),
            )

    x, v = shot
    t = np.linspace(0.0, 1.0, n_final + 1)
    diag = Diagnostics(method="shooting", iterations=iters, notes=notes,
                       max_residual=float(np.linalg.norm(x[-1] - q)), flagged=used_fallback)
    sol = _solution(M, t, x, v, 1.0 / n_final, diag)
    distance = float(np.sqrt(_speed2(M, p, xi_best)))
    if distance > straight * (1 + 1e-9):
        diag.flagged = True
        diag.notes.append("solution is longer than the straight chart segment (not minimizing)")
    return sol, distance


# -- linear transport along curves ----------------------------------------------


def sample_linear_transport(A, Y0, H):
    """RK4 for ``dY/dt = A(t) Y`` with ``A`` sampled at spacing ``H/2``.

    ``A`` has shape ``(2N+1, d, d)``; steps of size ``H`` use the samples at
    ``t, t+H/2, t+H`` as the RK4 stage points.  Returns ``Y`` at the
    ``N+1`` step points.
    """
    N = (len(A) - 1) // 2
    Y = np.empty((N + 1,) + np.shape(Y0))
    y = np.array(Y0, dtype=float)
    Y[0] = y
    for i in range(N):
        a0, am, a1 = A[2 * i], A[2 * i + 1], A[2 * i + 2]
        k1 = a0 @ y
        k2 = am @ (y + 0.5 * H * k1)
        k3 = am @ (y + 0.5 * H * k2)
        k4 = a1 @ (y + H * k3)
        y = y + (H / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Y[i + 1] = y
    return Y


def _transport_matrices(M, c: CurvePath, n_steps):
    t = np.linspace(c.t0, c.t1, 2 * n_steps + 1)
    x = c.point(t)
    if not np.all(M.contains(x)):
        raise DomainError("curve leaves the chart domain")
    v = c.velocity(t)
    gam = _gamma(M, x)
    A = -np.einsum("nkij,ni->nkj", gam, v)
    return t, x, A


def transport_frame(M: ChartMetric, c: CurvePath, frame, n_steps=2048, full=False):
    """Parallel transport of the columns of ``frame`` along ``c``.

    Returns the transported columns at ``c(t1)``; with ``full=True`` returns
    ``(t, x, frames)`` at all ``n_steps + 1`` step points instead.
    """
    t, x, A = _transport_matrices(M, c, n_steps)
    H = (c.t1 - c.t0) / n_steps
    Y = sample_linear_transport(A, np.asarray(frame, float), H)
    if not np.all(np.isfinite(Y)):
        raise ConvergenceError("parallel transport integration failed")
    if full:
        return t[::2], x[::2], Y
    return Y[-1]


def parallel_transport(M: ChartMetric, c: CurvePath, xi0, n_steps=2048):
    """Solve ``DX/dt = 0`` along ``c`` with ``X(t0) = xi0`` and return ``X(t1)``."""
    xi0 = np.asarray(xi0, dtype=float)
    return transport_frame(M, c, xi0[:, None], n_steps)[:, 0]
