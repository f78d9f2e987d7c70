"""Model spaces, cross-ratios, Klein distance and the triangle laws."""

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from geomkit.connection import geodesic_bvp
from geomkit.curvature import sectional
from geomkit.errors import DegenerateError, DomainError, GeometryError
from geomkit.models import (
    MODEL_NAMES,
    ModelDescriptor,
    TriangleData,
    beltrami_ball,
    cross_ratio,
    excess_defect_check,
    expected_sectional,
    half_plane_distance,
    inverse_stereographic,
    klein_disk,
    klein_distance,
    make_model,
    mobius_half_plane,
    parse_model,
    riemann_constant,
    stereographic_projection,
    triangle_law_residuals,
)

finite = st.floats(-5, 5, allow_nan=False)


def _sample(M, rng, n):
    """Random in-domain points of a registry model."""
    pts = []
    while len(pts) < n:
        x = rng.uniform(-0.9, 0.9, M.dim)
        if M.name.startswith("poincare"):
            x[-1] = rng.uniform(0.2, 2.0)
        if M.name == "tractrix_surface":
            x[0] = rng.uniform(0.2, 3.0)
        if M.contains(x):
            pts.append(x)
    return np.array(pts)


@pytest.mark.parametrize("model_text", [
    "euclidean:dim=2", "euclidean:dim=3", "sphere_stereographic:R=1", "sphere_stereographic:R=0.5",
    "riemann_constant:dim=3,alpha=-1", "riemann_constant:alpha=2", "poincare_half_plane",
    "beltrami_ball:dim=3", "beltrami_ball:dim=2", "klein_disk", "tractrix_surface:R=1.5",
])
def test_constant_curvature_certified(model_text, rng):
    desc = parse_model(model_text)
    M = make_model(desc)
    K = []
    for x in _sample(M, rng, 50):
        xi, eta = rng.normal(size=(2, M.dim))
        K.append(sectional(M, x, xi, eta))
    assert np.std(K) < 1e-5
    assert np.max(np.abs(np.array(K) - expected_sectional(desc))) < 1e-5


def test_registry_names_all_buildable():
    for name in MODEL_NAMES:
        assert make_model(ModelDescriptor(name, 3 if name in ("beltrami_ball",) else 2)).dim >= 2


def test_unknown_model_and_bad_params():
    with pytest.raises(GeometryError):
        parse_model("hyperboloid")
    with pytest.raises(GeometryError):
        parse_model("sphere_stereographic:R")
    with pytest.raises(GeometryError):
        make_model("sphere_stereographic:R=-1")


def test_riemann_constant_zero_is_identity(rng):
    M = riemann_constant(2, 0.0)
    np.testing.assert_array_equal(M.metric(rng.normal(size=(5, 2))), np.broadcast_to(np.eye(2), (5, 2, 2)))


def test_beltrami_equals_riemann_constant_minus_one(rng):
    x = rng.uniform(-1, 1, (20, 3))
    assert np.array_equal(beltrami_ball(3).metric(x), riemann_constant(3, -1.0).metric(x))


@pytest.mark.parametrize("name, bad", [
    ("poincare_half_plane", [0.0, 0.0]),
    ("beltrami_ball:dim=2", [2.0, 0.1]),
    ("klein_disk", [0.8, 0.6]),
    ("riemann_constant:alpha=-4", [1.0, 0.0]),
])
def test_domain_predicates(name, bad):
    assert not make_model(name).contains(bad)


def test_stereographic_roundtrip(rng):
    X = rng.normal(size=(10, 3))
    X *= 2.0 / np.linalg.norm(X, axis=1, keepdims=True)
    np.testing.assert_allclose(inverse_stereographic(stereographic_projection(X, 2.0), 2.0), X, atol=1e-12)


def test_cross_ratio_example():
    assert cross_ratio(0, 1, 2, 3) == pytest.approx(4 / 3, abs=1e-15)


def test_cross_ratio_degenerate():
    with pytest.raises(DegenerateError):
        cross_ratio(0, 1, 1, 3)


def test_cross_ratio_collinear_points():
    P = [np.array([1.0, 1.0]) + t * np.array([2.0, -1.0]) for t in (0, 1, 2, 3)]
    assert cross_ratio(*P) == pytest.approx(4 / 3, rel=1e-12)


@given(st.lists(finite, min_size=4, max_size=4, unique=True), finite, finite, finite, finite)
def test_cross_ratio_projective_invariance(xs, a, b, c, d):
    assume(abs(a * d - b * c) > 1e-2)
    assume(all(abs(c * x + d) > 1e-2 for x in xs))
    assume(all(abs(p - q) > 1e-2 for i, p in enumerate(xs) for q in xs[i + 1:]))
    T = [(a * x + b) / (c * x + d) for x in xs]
    assert cross_ratio(*T) == pytest.approx(cross_ratio(*xs), rel=1e-8)


@pytest.mark.parametrize("t", np.arange(1, 10) / 10)
def test_klein_diameter_distance(t):
    assert abs(klein_distance([0, 0], [t, 0]) - math.atanh(t)) < 1e-10


def test_klein_distance_zero_and_symmetric(rng):
    assert klein_distance([0.3, 0.2], [0.3, 0.2]) == 0.0
    P, Q = rng.uniform(-0.6, 0.6, (2, 2))
    assert klein_distance(P, Q) == pytest.approx(klein_distance(Q, P), rel=1e-14)
    with pytest.raises(DomainError):
        klein_distance([1.0, 0.0], [0.0, 0.0])


def test_klein_distance_matches_bvp():
    P, Q = np.array([-0.4, 0.3]), np.array([0.5, -0.2])
    _, d = geodesic_bvp(klein_disk(), P, Q)
    assert abs(d - klein_distance(P, Q)) < 1e-5


def test_mobius_preserves_half_plane_distance():
    T = mobius_half_plane(2.0, 1.0, 0.5, 1.0)
    p, q = np.array([0.0, 1.0]), np.array([1.0, 1.5])
    _, d1 = geodesic_bvp(make_model("poincare_half_plane"), p, q)
    _, d2 = geodesic_bvp(make_model("poincare_half_plane"), T(p), T(q))
    assert abs(d1 - d2) < 1e-5
    assert abs(d1 - half_plane_distance(p, q)) < 1e-8


def test_octant_laws_exact():
    T = TriangleData(*(3 * [math.pi / 2]), *(3 * [math.pi / 2]), R=1.0)
    assert np.max(np.abs(triangle_law_residuals(T, "spherical"))) < 1e-15
    assert excess_defect_check(T, math.pi / 2, "spherical") < 1e-15


def _hyperbolic_right(b, c, R=1.0):
    """Right angle at A; the rest from the hyperbolic right-triangle relations."""
    a = R * math.acosh(math.cosh(b / R) * math.cosh(c / R))
    B = math.atan2(math.tanh(b / R), math.sinh(c / R))
    C = math.atan2(math.tanh(c / R), math.sinh(b / R))
    return TriangleData(a, b, c, math.pi / 2, B, C, R)


@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0.5, 3.0))
def test_hyperbolic_right_triangle_laws(b, c, R):
    T = _hyperbolic_right(b * R, c * R, R)
    assert np.max(np.abs(triangle_law_residuals(T, "hyperbolic"))) < 1e-9


def test_absolute_unit():
    T = _hyperbolic_right(0.8, 1.1)
    wrong = TriangleData(T.a, T.b, T.c, T.A, T.B, T.C, R=1.1)
    assert np.max(np.abs(triangle_law_residuals(T, "hyperbolic"))) < 1e-12
    assert np.max(np.abs(triangle_law_residuals(wrong, "hyperbolic"))) > 1e-3


def _spherical_from_sides(a, b, c):
    A = math.acos((math.cos(a) - math.cos(b) * math.cos(c)) / (math.sin(b) * math.sin(c)))
    B = math.acos((math.cos(b) - math.cos(c) * math.cos(a)) / (math.sin(c) * math.sin(a)))
    C = math.acos((math.cos(c) - math.cos(a) * math.cos(b)) / (math.sin(a) * math.sin(b)))
    return TriangleData(a, b, c, A, B, C)


@given(st.floats(0.3, 1.5), st.floats(0.3, 1.5), st.floats(0.3, 1.5))
def test_spherical_laws_consistent(a, b, c):
    assume(a < b + c - 0.05 and b < a + c - 0.05 and c < a + b - 0.05)
    T = _spherical_from_sides(a, b, c)
    assert np.max(np.abs(triangle_law_residuals(T, "spherical"))) < 1e-9


def test_bad_mode_and_bad_triangle():
    with pytest.raises(GeometryError):
        triangle_law_residuals(_hyperbolic_right(1, 1), "elliptic")
    with pytest.raises(DegenerateError):
        TriangleData(1, 1, 1, math.pi, 0.1, 0.1)
