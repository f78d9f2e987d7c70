"""The seventeen acceptance checks, shared by the test suite and ``geomkit verify``.

Each check returns a :class:`CheckResult` holding the measured worst-case
residuals next to their tolerances.  Randomized checks draw from
``numpy.random.default_rng`` seeded from the suite seed and the check
number, so a fixed seed reproduces every number.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import lorentz, quaternion, surfaces, topology
from .connection import christoffel, geodesic_bvp, geodesic_ivp, transport_frame
from .curvature import flatness_check, jacobi_deviation, jacobi_family_error, sectional
from .errors import DegenerateError
from .gauss_bonnet import build_triangle, total_curvature_closed, triangle_report
from .metric import CurvePath
from .models import (
    beltrami_ball,
    euclidean,
    excess_defect_check,
    klein_disk,
    klein_distance,
    poincare_half_plane,
    riemann_constant,
    sphere_stereographic,
    tractrix_surface,
    triangle_law_residuals,
)

__all__ = ["CheckResult", "CHECKS", "run_check", "run_suite", "clear_cache"]

DEFAULT_SEED = 42


@dataclass
class CheckResult:
    """Outcome of one acceptance check."""

    number: int
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{status}] {self.number:02d} {self.name} ({self.seconds:.1f}s): {parts}"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "metrics": dict(self.metrics), "seconds": self.seconds}


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _rng(seed, number, *extra):
    return np.random.default_rng([seed, number, *extra])


def _worst(values):
    return float(np.max(np.abs(np.asarray(values, dtype=float))))


# -- shared triangle sets ---------------------------------------------------------------

_TRIANGLES: dict = {}

_TRIANGLE_MODELS = {
    "sphere": (lambda: sphere_stereographic(2, 1.0), "spherical"),
    "half_plane": (lambda: poincare_half_plane(), "hyperbolic"),
    "beltrami": (lambda: beltrami_ball(3), "hyperbolic"),
}


def _sample_vertices(kind, rng):
    if kind == "sphere":
        r = 0.8 * np.sqrt(rng.uniform(0, 1, 3))
        th = rng.uniform(0, 2 * np.pi, 3)
        return np.column_stack([r * np.cos(th), r * np.sin(th)])
    if kind == "half_plane":
        return np.column_stack([rng.uniform(-1.0, 1.0, 3), rng.uniform(0.3, 2.0, 3)])
    v = rng.normal(size=(3, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * 1.2 * rng.uniform(0, 1, (3, 1)) ** (1 / 3)


def _triangles(kind, count, seed):
    """First ``count`` random triangles (with reports) of a model; cached per seed."""
    key = (kind, seed)
    items = _TRIANGLES.setdefault(key, [])
    make, _ = _TRIANGLE_MODELS[kind]
    M = make()
    draw = len(items) and items[-1][0] + 1
    while len(items) < count:
        rng = _rng(seed, 1000, list(_TRIANGLE_MODELS).index(kind), draw)
        V = _sample_vertices(kind, rng)
        try:
            T = build_triangle(M, *V)
        except DegenerateError:
            draw += 1
            continue
        items.append((draw, T, triangle_report(M, T)))
        draw += 1
    return M, [(T, rep) for _, T, rep in items[:count]]


def clear_cache():
    _TRIANGLES.clear()


# -- the checks -------------------------------------------------------------------------


def check_01(seed):
    worst = 0.0
    for R in (0.5, 1.0, 2.0):
        M = sphere_stereographic(2, R)
        rng = _rng(seed, 1, int(R * 10))
        for x in rng.uniform(-2 * R, 2 * R, (50, 2)):
            xi, eta = rng.normal(size=(2, 2))
            K = sectional(M, x, xi, eta)
            worst = max(worst, abs(K * R * R - 1.0))
    return worst < 1e-5, {"max_rel_error": worst, "tol": 1e-5}


def _surface_samples(seed):
    return {
        "sphere": (surfaces.sphere(1.5), (0.2, np.pi - 0.2), (0.0, 2 * np.pi)),
        "cylinder": (surfaces.cylinder(0.7), (0.0, 2 * np.pi), (-2.0, 2.0)),
        "torus": (surfaces.torus(2.0, 1.0), (0.0, 2 * np.pi), (0.0, 2 * np.pi)),
        "tractrix": (surfaces.tractrix(1.3), (0.1, 3.0), (-np.pi, np.pi)),
        "random_graph": (surfaces.random_graph(seed), (-0.95, 0.95), (-0.95, 0.95)),
    }


def check_02(seed):
    metrics = {}
    ok = True
    for k, (name, (S, ur, vr)) in enumerate(_surface_samples(seed).items()):
        rng = _rng(seed, 2, k)
        c = surfaces.curvatures(S, rng.uniform(*ur, 100), rng.uniform(*vr, 100))
        gap = _worst(c.K_intrinsic - c.K_extrinsic)
        metrics[name] = gap
        ok &= gap < 1e-5
    metrics["tol"] = 1e-5
    return ok, metrics


def check_03(seed):
    R = 1.3
    rng = _rng(seed, 3)
    S = surfaces.tractrix(R)
    c = surfaces.curvatures(S, rng.uniform(0.1, 3.0, 100), rng.uniform(-np.pi, np.pi, 100))
    M = tractrix_surface(R)
    pts = np.column_stack([rng.uniform(0.1, 3.0, 50), rng.uniform(-np.pi, np.pi, 50)])
    ks = np.array([sectional(M, x, [1.0, 0.0], [0.0, 1.0]) for x in pts])
    allk = np.concatenate([c.K_extrinsic, c.K_intrinsic, ks])
    std = float(np.std(allk))
    bias = float(np.max(np.abs(allk + 1.0 / R ** 2)))
    return std < 1e-5 and bias < 1e-5, {"std": std, "max_dev_from_-1/R^2": bias, "tol": 1e-5}


def check_04(seed):
    metrics = {}
    ok = True
    for kind in ("sphere", "half_plane", "beltrami"):
        _, items = _triangles(kind, 10, seed)
        gap = max(rep.residuals["integral_vs_excess"] for _, rep in items)
        metrics[kind] = gap
        ok &= gap < 1e-4
    metrics["tol"] = 1e-4
    return ok, metrics


def _octant():
    M = sphere_stereographic(2, 1.0)
    T = build_triangle(M, [1.0, 0.0], [0.0, 1.0], [0.0, 0.0])
    return M, T, triangle_report(M, T)


def check_05(seed):
    _, _, rep = _octant()
    octant_gap = abs(rep.holonomy - math.pi / 2)
    general = 0.0
    for kind in ("sphere", "half_plane", "beltrami"):
        _, items = _triangles(kind, 10, seed)
        general = max(general, max(r.residuals["holonomy_vs_excess"] for _, r in items))
    ok = octant_gap < 1e-4 and general < 1e-4
    return ok, {"octant_gap": octant_gap, "max_holonomy_vs_excess": general, "tol": 1e-4}


def check_06(seed):
    res_s, tot_s = total_curvature_closed(surfaces.sphere(1.0), 2)
    res_t, tot_t = total_curvature_closed(surfaces.torus(2.0, 1.0), 0)
    ok = res_s < 1e-4 and res_t < 1e-4
    return ok, {"sphere_total": tot_s, "sphere_residual": res_s, "torus_total": tot_t,
                "torus_residual": res_t, "tol": 1e-4}


def check_07(seed):
    metrics = {}
    ok = True
    for kind in ("sphere", "half_plane"):
        _, items = _triangles(kind, 20, seed)
        mode = _TRIANGLE_MODELS[kind][1]
        gap = max(_worst(triangle_law_residuals(T.data(1.0), mode)) for T, _ in items)
        metrics[kind] = gap
        ok &= gap < 1e-6
    metrics["tol"] = 1e-6
    return ok, metrics


def check_08(seed):
    metrics = {}
    ok = True
    for kind in ("sphere", "half_plane"):
        _, items = _triangles(kind, 20, seed)
        mode = _TRIANGLE_MODELS[kind][1]
        gap = max(excess_defect_check(T.data(1.0), rep.area, mode) for T, rep in items)
        metrics[kind] = gap
        ok &= gap < 1e-4
    metrics["tol"] = 1e-4
    return ok, metrics


def check_09(seed):
    ts = np.arange(1, 10) / 10.0
    closed = max(abs(klein_distance([0.0, 0.0], [t, 0.0]) - math.atanh(t)) for t in ts)
    M = klein_disk()
    rng = _rng(seed, 9)
    gap = 0.0
    for _ in range(6):
        P, Q = (r * np.array([math.cos(a), math.sin(a)])
                for r, a in zip(0.8 * np.sqrt(rng.uniform(0, 1, 2)), rng.uniform(0, 2 * np.pi, 2)))
        _, d = geodesic_bvp(M, P, Q)
        gap = max(gap, abs(d - klein_distance(P, Q)))
    ok = closed < 1e-10 and gap < 1e-5
    return ok, {"artanh_gap": closed, "artanh_tol": 1e-10, "bvp_gap": gap, "bvp_tol": 1e-5}


def _transport_models():
    return [sphere_stereographic(2, 1.0), poincare_half_plane(), klein_disk(),
            beltrami_ball(3), tractrix_surface(1.0), tractrix_surface(1.0).without_derivative()]


def _test_curve(M, rng):
    d = M.dim
    base = np.full(d, 0.0)
    if M.name == "poincare_half_plane":
        base[-1] = 1.0
    if M.name == "tractrix_surface":
        base[0] = 1.5
    a, b, c = rng.uniform(-0.3, 0.3, (3, d))

    def point(t):
        t = np.asarray(t, float)[..., None]
        return base + a * np.sin(2 * np.pi * t) + b * t + c * t * t

    def velocity(t):
        t = np.asarray(t, float)[..., None]
        return 2 * np.pi * a * np.cos(2 * np.pi * t) + b + 2 * c * t

    return CurvePath(point, velocity, 0.0, 1.0)


def check_10(seed):
    rng = _rng(seed, 10)
    drift = 0.0
    asym = 0.0
    for M in _transport_models():
        c = _test_curve(M, rng)
        frame = rng.normal(size=(M.dim, 2))
        _, x, Y = transport_frame(M, c, frame, n_steps=1024, full=True)
        g = M.metric(x)
        G = np.einsum("nia,nij,njb->nab", Y, g, Y)
        drift = max(drift, _worst(G - G[0]) / max(1.0, _worst(G[0])))
        pts = c.point(np.linspace(0, 1, 20))
        gam = christoffel(M, pts)
        asym = max(asym, _worst(gam - np.swapaxes(gam, -1, -2)))
    ok = drift < 1e-6 and asym == 0.0
    return ok, {"inner_product_drift": drift, "drift_tol": 1e-6, "gamma_asymmetry": asym}


def check_11(seed):
    S = sphere_stereographic(2, 1.0)
    geo = geodesic_ivp(S, [1.0, 0.0], [0.0, 1.0], 3.0, step=3.0 / 2048)
    J = jacobi_deviation(S, geo, [0.0, 0.0], [1.0, 0.0])
    sphere_gap = _worst(J.norms(S) - np.abs(np.sin(J.t)))
    sphere_fd = jacobi_family_error(S, geo, J)
    H = poincare_half_plane()
    geo = geodesic_ivp(H, [0.0, 1.0], [0.0, 1.0], 2.0, step=2.0 / 2048)
    J = jacobi_deviation(H, geo, [0.0, 0.0], [1.0, 0.0])
    hyp_gap = _worst(J.norms(H) - np.sinh(J.t))
    hyp_fd = jacobi_family_error(H, geo, J)
    fd = max(sphere_fd, hyp_fd)
    ok = sphere_gap < 1e-4 and hyp_gap < 1e-3 and fd < 1e-3
    return ok, {"sphere_sin_gap": sphere_gap, "half_plane_sinh_gap": hyp_gap, "family_fd_gap": fd}


def _canonical_suite():
    t = lambda n: 2 * np.pi * np.arange(n) / n  # noqa: E731
    circle_d = lambda s: (-np.sin(s), np.cos(s), -np.cos(s), -np.sin(s))  # noqa: E731
    reverse_d = lambda s: (np.sin(-s), -np.cos(-s), -np.cos(-s), -np.sin(-s))  # noqa: E731
    eight_d = lambda s: (2 * np.cos(2 * s), np.cos(s), -4 * np.sin(2 * s), -np.sin(s))  # noqa: E731
    # z = 2 e^{is}, z^2 = 4 e^{2is}
    power_d = lambda s: (-8 * np.sin(2 * s), 8 * np.cos(2 * s), -16 * np.cos(2 * s), -16 * np.sin(2 * s))  # noqa: E731
    del t
    return [
        ("circle", topology.circle(), circle_d, (0.0, 0.0), 1, 1),
        ("reversed_circle", topology.circle(ccw=False), reverse_d, (0.0, 0.0), -1, -1),
        ("figure_eight", topology.figure_eight(), eight_d, (0.5, 0.3), None, 0),
        ("z_squared", topology.power_image(), power_d, (0.0, 0.0), 2, 2),
    ]


def check_12(seed):
    ok = True
    metrics = {}
    kappa_gap = 0.0
    for name, c, deriv, p0, w_expect, r_expect in _canonical_suite():
        R, total = topology.rotation_invariants(c)
        good = R == r_expect
        if w_expect is not None:
            good &= topology.winding_number(c, p0) == w_expect
        else:
            # figure-eight lobes wind in opposite senses
            good &= {topology.winding_number(c, (0.5, 0.3)), topology.winding_number(c, (0.5, -0.3))} == {1, -1}
        smooth = topology.smooth_total_curvature(deriv)
        kappa_gap = max(kappa_gap, abs(smooth - 2 * np.pi * R), abs(total - 2 * np.pi * R))
        metrics[name] = "ok" if good else "wrong"
        ok &= bool(good)
    metrics["kappa_gap"] = kappa_gap
    metrics["tol"] = 1e-6
    return ok and kappa_gap < 1e-6, metrics


def check_13(seed):
    rng = _rng(seed, 13)
    violations = 0
    for _ in range(50):
        c = topology.random_fourier_curve(rng).sample(2048)
        R, _ = topology.rotation_invariants(c)
        n, _ = topology.self_intersections(c)
        violations += int(n < abs(abs(R) - 1))
    return violations == 0, {"curves": 50, "violations": violations}


def check_14(seed):
    a, b = topology.hopf_link()
    m, raw = topology.linking_number(a, b)
    m2, _ = topology.linking_number(b, a)
    rel = abs(abs(raw) - 4 * np.pi) / (4 * np.pi)
    ok = abs(m) == 1 and rel < 1e-2 and m == m2
    return ok, {"m": m, "m_swapped": m2, "raw_rel_error": rel, "tol": 1e-2}


def check_15(seed):
    rng = _rng(seed, 15)
    Q = quaternion
    i, j, k = (np.eye(4)[n] for n in (1, 2, 3))
    exact = np.array_equal(Q.qmul(i, j), k) and np.array_equal(Q.qmul(j, i), -k)
    p, q = rng.normal(size=(2, 1000, 4))
    pq = Q.qmul(p, q)
    norm_err = _worst(np.linalg.norm(pq, axis=1) / (np.linalg.norm(p, axis=1) * np.linalg.norm(q, axis=1)) - 1)
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    Ap, _ = Q.rotation_matrix(p)
    Aq, _ = Q.rotation_matrix(q)
    Apq, _ = Q.rotation_matrix(Q.qmul(p, q))
    hom_err = _worst(Ap @ Aq - Apq)
    G = Q.binary_icosahedral()
    n_distinct = len({tuple(np.round(g, 9)) for g in G})
    closed = Q.closure_check(G)
    n_rot = Q.distinct_rotations(G)
    ok = exact and norm_err < 1e-12 and hom_err < 1e-10 and n_distinct == 120 and closed and n_rot == 60
    return ok, {"ij_exact": exact, "norm_rel_error": norm_err, "hom_error": hom_err,
                "group_order": n_distinct, "closed": closed, "rotations": n_rot}


def check_16(seed):
    rng = _rng(seed, 16)
    L = lorentz
    inv = 0.0
    cons = 0.0
    for _ in range(100):
        v = rng.normal(size=3)
        v *= rng.uniform(0, 0.95) / np.linalg.norm(v)
        B = L.boost_from_velocity(v)
        e1, e2 = (L.Event(rng.normal(size=3), rng.normal()) for _ in range(2))
        before = L.interval(e1, e2)
        after = L.interval(L.apply(B, e1), L.apply(B, e2))
        inv = max(inv, abs(after - before) / max(1.0, abs(before)))
        cons = max(cons, B.constraint_residual(), abs(abs(np.linalg.det(B.A)) - B.gamma))
    comp = 0.0
    for _ in range(20):
        u, w = rng.uniform(-0.95, 0.95, 2)
        M = L.compose(L.boost_from_velocity([u, 0, 0]), L.boost_from_velocity([w, 0, 0]))
        comp = max(comp, abs(L.induced_velocity(M)[0] - L.velocity_addition(u, w)))
    gaps = L.galilei_decay([0.5, 0.2, 0.1])
    ratios = gaps[:-1] / gaps[1:]
    decay_ok = bool(np.all(np.abs(ratios / 100.0 - 1.0) < 0.2))
    ok = inv < 1e-10 and cons < 1e-12 and comp < 1e-10 and decay_ok
    return ok, {"interval_error": inv, "constraint_error": cons, "composition_error": comp,
                "galilei_ratio_min": float(ratios.min()), "galilei_ratio_max": float(ratios.max())}


def check_17(seed):
    rng = _rng(seed, 17)
    flat_e, res_e = flatness_check(euclidean(3), rng.normal(size=(100, 3)))
    cyl = surfaces.induced_metric(surfaces.cylinder(1.0))
    pts = np.column_stack([rng.uniform(0.1, 6.0, 50), rng.uniform(-2, 2, 50)])
    flat_c, res_c = flatness_check(cyl, pts)
    flat_s, res_s = flatness_check(sphere_stereographic(2, 1.0), rng.uniform(-1, 1, (10, 2)))
    flat_r, _ = flatness_check(riemann_constant(3, 0.0), rng.normal(size=(20, 3)))
    ok = flat_e and flat_c and flat_r and not flat_s
    return ok, {"euclidean": res_e, "cylinder": res_c, "sphere": res_s, "tol": 1e-6}


CHECKS = {
    1: ("sphere sectional curvature", check_01),
    2: ("theorema egregium", check_02),
    3: ("tractrix constant curvature", check_03),
    4: ("gauss triangle formula", check_04),
    5: ("triangle holonomy", check_05),
    6: ("global gauss-bonnet", check_06),
    7: ("trigonometric laws", check_07),
    8: ("excess and defect vs area", check_08),
    9: ("klein distance", check_09),
    10: ("metric compatibility and torsion", check_10),
    11: ("jacobi fields", check_11),
    12: ("winding and rotation numbers", check_12),
    13: ("gauss self-intersection inequality", check_13),
    14: ("linking number", check_14),
    15: ("quaternions", check_15),
    16: ("lorentz boosts", check_16),
    17: ("flatness", check_17),
}


def run_check(number: int, seed: int = DEFAULT_SEED) -> CheckResult:
    name, fn = CHECKS[number]
    t0 = time.perf_counter()
    passed, metrics = fn(seed)
    return CheckResult(number, name, bool(passed), metrics, time.perf_counter() - t0)


def run_suite(which="all", seed: int = DEFAULT_SEED):
    """Run the selected checks (``"all"`` or an iterable of numbers) in order."""
    numbers = sorted(CHECKS) if which == "all" else sorted(int(n) for n in which)
    return [run_check(n, seed) for n in numbers]
