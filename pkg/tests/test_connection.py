"""Christoffel symbols, parallel transport and geodesics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomkit.connection import (
    christoffel,
    covariant_derivative,
    geodesic_bvp,
    geodesic_ivp,
    parallel_transport,
    transport_frame,
)
from geomkit.errors import SignatureError
from geomkit.metric import ChartMetric, CurvePath, curve_measures
from geomkit.models import (
    beltrami_ball,
    euclidean,
    half_plane_distance,
    klein_disk,
    poincare_half_plane,
    sphere_stereographic,
    tractrix_surface,
)


def _arc(center, radius, a0, a1):
    center = np.asarray(center, float)

    def point(t):
        t = np.asarray(t, float)
        return center + radius * np.stack([np.cos(t), np.sin(t)], -1)

    def velocity(t):
        t = np.asarray(t, float)
        return radius * np.stack([-np.sin(t), np.cos(t)], -1)

    if a1 < a0:
        return CurvePath(lambda s: point(a0 + a1 - s), lambda s: -velocity(a0 + a1 - s), a1, a0)
    return CurvePath(point, velocity, a0, a1)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_euclidean_christoffel_zero(d, rng):
    assert np.all(christoffel(euclidean(d), rng.normal(size=(5, d))) == 0)


def test_half_plane_christoffel(rng):
    for x, y in rng.uniform([-2, 0.2], [2, 3], (10, 2)):
        G = christoffel(poincare_half_plane(), [x, y])
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 1] = expected[0, 1, 0] = -1 / y
        expected[1, 0, 0] = 1 / y
        expected[1, 1, 1] = -1 / y
        np.testing.assert_allclose(G, expected, atol=1e-13)


def test_sphere_origin_christoffel_zero():
    np.testing.assert_allclose(christoffel(sphere_stereographic(2, 1.0), [0.0, 0.0]), 0.0, atol=1e-15)


@pytest.mark.parametrize("M", [
    sphere_stereographic(2, 1.3), poincare_half_plane(), klein_disk(), beltrami_ball(3),
    tractrix_surface(1.0), klein_disk().without_derivative(), beltrami_ball(3).without_derivative(),
], ids=lambda M: M.name)
def test_christoffel_symmetric_exactly(M, rng):
    x = rng.uniform(-0.3, 0.3, (20, M.dim))
    x[:, -1 if M.name.startswith("poincare") else 0] += 1.0 if M.name != "klein_disk" else 0.0
    G = christoffel(M, x)
    assert np.array_equal(G, np.swapaxes(G, -1, -2))


def test_analytic_christoffel_matches_formula(rng):
    M = sphere_stereographic(3, 2.0)
    x = rng.uniform(-1, 1, (10, 3))
    plain = ChartMetric(3, M.g, M.dg)
    np.testing.assert_allclose(christoffel(M, x), christoffel(plain, x), atol=1e-13)


def test_covariant_derivative_flat():
    out = covariant_derivative(euclidean(2), [0, 0], [1, 0], [1, 2], [3, 4])
    np.testing.assert_allclose(out, [3, 4])


def test_euclidean_transport_unchanged():
    c = _arc([0, 0], 2.0, 0.0, 3.0)
    np.testing.assert_allclose(parallel_transport(euclidean(2), c, [1.0, -2.0]), [1.0, -2.0], atol=1e-14)


def test_equator_loop_holonomy_trivial():
    xi = np.array([0.3, 0.7])
    out = parallel_transport(sphere_stereographic(2, 1.0), _arc([0, 0], 1.0, 0.0, 2 * math.pi), xi)
    assert np.max(np.abs(out - xi)) < 1e-6


def test_octant_perimeter_rotates_quarter_turn():
    M = sphere_stereographic(2, 1.0)
    X = np.array([1.0, 0.0])
    for c in (CurvePath.segment([0, 0], [1, 0]), _arc([0, 0], 1.0, 0.0, math.pi / 2), CurvePath.segment([0, 1], [0, 0])):
        X = parallel_transport(M, c, X)
    angle = math.atan2(X[1], X[0])
    assert abs(abs(angle) - math.pi / 2) < 1e-6
    assert np.linalg.norm(X) == pytest.approx(1.0, abs=1e-9)


@given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(0.2, 1.5))
def test_metric_compatibility(a, b, w):
    M = poincare_half_plane()
    c = CurvePath(lambda t: np.stack([a * np.sin(3 * t) + t, 1 + b * t + 0.3 * np.cos(w * t)], -1),
                  lambda t: np.stack([3 * a * np.cos(3 * t) + 1, b - 0.3 * w * np.sin(w * t)], -1), 0.0, 2.0)
    frame = np.array([[1.0, 0.4], [0.2, -1.0]])
    _, x, Y = transport_frame(M, c, frame, n_steps=512, full=True)
    G = np.einsum("nia,nij,njb->nab", Y, M.metric(x), Y)
    assert np.max(np.abs(G - G[0])) < 1e-6


def test_ivp_straight_line():
    sol = geodesic_ivp(euclidean(2), [0, 0], [1, 2], 1.0)
    np.testing.assert_allclose(sol.endpoint, [1, 2], atol=1e-14)
    assert sol.arc_length == pytest.approx(math.sqrt(5), rel=1e-12)


def test_half_plane_geodesic_is_semicircle():
    sol = geodesic_ivp(poincare_half_plane(), [0.0, 1.0], [1.0, 0.0], 6.0)
    x, y = sol.x.T
    # fit x^2 + y^2 + D x + E y + F = 0
    A = np.column_stack([x, y, np.ones_like(x)])
    D, E, F = np.linalg.lstsq(A, -(x ** 2 + y ** 2), rcond=None)[0]
    cx, cy = -D / 2, -E / 2
    r = math.sqrt(cx ** 2 + cy ** 2 - F)
    assert np.max(np.abs(np.hypot(x - cx, y - cy) - r)) < 1e-5
    assert abs(cy) < 1e-5  # centred on the boundary, so it meets y = 0 at right angles


def test_sphere_quarter_great_circle():
    M = sphere_stereographic(2, 1.0)
    sol = geodesic_ivp(M, [1.0, 0.0], [0.0, 1.0], math.pi / 2)
    np.testing.assert_allclose(sol.endpoint, [0.0, 1.0], atol=1e-9)
    assert sol.arc_length == pytest.approx(math.pi / 2, abs=1e-6)


@settings(max_examples=8)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_ivp_speed_constant(u, v):
    sol = geodesic_ivp(sphere_stereographic(2, 1.0), [0.2, -0.1], [u + 1.5, v], 0.5)
    assert sol.diagnostics.speed_drift < 1e-6


def test_ivp_domain_exit_clipped():
    # the tractrix chart ends at the rim u = 0, reached in finite time
    M = tractrix_surface(1.0)
    sol = geodesic_ivp(M, [1.0, 0.0], [-1.0, 0.0], 5.0)
    assert sol.diagnostics.exited_domain
    assert np.all(M.contains(sol.x))
    assert sol.t[-1] < 5.0


def test_lorentzian_rejected():
    M = ChartMetric(2, lambda x: np.diag([1.0, -1.0]), vectorized=False, signature="lorentzian")
    with pytest.raises(SignatureError):
        geodesic_ivp(M, [0, 0], [1, 0], 1.0)


def test_bvp_euclidean_distance(rng):
    p, q = rng.normal(size=(2, 3))
    sol, d = geodesic_bvp(euclidean(3), p, q)
    assert d == pytest.approx(math.sqrt(np.sum((p - q) ** 2)), rel=1e-12)
    np.testing.assert_allclose(sol.x[-1], q, atol=1e-8)


def test_bvp_half_plane_vertical():
    sol, d = geodesic_bvp(poincare_half_plane(), [0.0, 1.0], [0.0, math.e ** 2])
    assert d == pytest.approx(2.0, abs=1e-9)
    assert np.max(np.abs(sol.x[:, 0])) < 1e-9


@pytest.mark.parametrize("t", [0.3, 1.0, 1.7])
def test_bvp_beltrami_radial(t):
    _, d = geodesic_bvp(beltrami_ball(2), [0.0, 0.0], [t, 0.0])
    assert d == pytest.approx(2 * math.atanh(t / 2), abs=1e-8)


def test_bvp_matches_closed_form_half_plane(rng):
    for _ in range(3):
        p, q = rng.uniform([-1, 0.3], [1, 2], (2, 2))
        _, d = geodesic_bvp(poincare_half_plane(), p, q)
        assert d == pytest.approx(half_plane_distance(p, q), abs=1e-8)


def test_bvp_not_longer_than_straight_segment(rng):
    M = klein_disk()
    p, q = np.array([-0.5, 0.1]), np.array([0.4, 0.3])
    _, d = geodesic_bvp(M, p, q)
    L, _ = curve_measures(M, CurvePath.segment(p, q))
    assert d <= L + 1e-9


@pytest.mark.parametrize("M, lo, hi", [
    (poincare_half_plane(), [-1, 0.3], [1, 2]),
    (sphere_stereographic(2, 1.0), [-0.6, -0.6], [0.6, 0.6]),
    (beltrami_ball(2), [-1, -1], [1, 1]),
], ids=["half_plane", "sphere", "beltrami"])
def test_triangle_inequality(M, lo, hi, rng):
    p, q, r = rng.uniform(lo, hi, (3, 2))
    d = lambda a, b: geodesic_bvp(M, a, b)[1]  # noqa: E731
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-6


def test_bvp_locally_minimizes_energy(rng):
    M = sphere_stereographic(2, 1.0)
    sol, _ = geodesic_bvp(M, [0.2, -0.3], [-0.4, 0.5])
    c = sol.as_curve()
    E0 = curve_measures(M, c)[1]
    for _ in range(3):
        k, a = rng.integers(1, 4), rng.normal(size=2)
        bump = lambda t: np.sin(k * np.pi * np.asarray(t))[..., None] * a  # noqa: E731
        dbump = lambda t: (k * np.pi * np.cos(k * np.pi * np.asarray(t)))[..., None] * a  # noqa: E731
        for eps in (1e-3, -1e-3):
            pert = CurvePath(lambda t: c.point(t) + eps * bump(t), lambda t: c.velocity(t) + eps * dbump(t), 0.0, 1.0)
            assert curve_measures(M, pert)[1] >= E0 - 1e-8


def test_ivp_bvp_consistency():
    M = poincare_half_plane()
    xi = np.array([0.7, 0.4])
    T = 1.5
    ivp = geodesic_ivp(M, [0.0, 1.0], xi, T)
    _, d = geodesic_bvp(M, [0.0, 1.0], ivp.endpoint)
    assert d == pytest.approx(T * math.sqrt(xi @ M.metric([0.0, 1.0]) @ xi), abs=1e-5)


def test_bvp_far_point_on_sphere():
    # chart radius r sits at polar angle 2 atan(r) from the chart origin
    M = sphere_stereographic(2, 1.0)
    sol, d = geodesic_bvp(M, [0.0, 0.0], [0.0, 4.0])
    assert d == pytest.approx(2 * math.atan(4.0), abs=1e-8)
    assert np.linalg.norm(sol.x[-1] - [0.0, 4.0]) < 1e-8


def test_bvp_same_point():
    sol, d = geodesic_bvp(poincare_half_plane(), [0.0, 1.0], [0.0, 1.0])
    assert d == 0.0


def test_geodesic_csv_table():
    sol = geodesic_ivp(poincare_half_plane(), [0.0, 1.0], [1.0, 0.0], 1.0, step=0.25, max_halvings=0)
    assert sol.table().shape == (5, 6)
    assert sol.csv_header() == ["t", "x_1", "x_2", "v_1", "v_2", "s"]
