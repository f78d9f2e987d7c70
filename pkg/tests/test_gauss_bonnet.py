"""Geodesic triangles, curvature integrals, holonomy and global Gauss-Bonnet."""

import math
import warnings

import numpy as np
import pytest

from geomkit.connection import geodesic_bvp
from geomkit.errors import DegenerateError, DomainError, GeometryError
from geomkit.gauss_bonnet import (
    build_triangle,
    euler_characteristic,
    total_curvature_closed,
    triangle_integral,
    triangle_report,
)
from geomkit.models import beltrami_ball, euclidean, poincare_half_plane, sphere_stereographic
from geomkit.surfaces import ParametricSurface, cylinder, plane, sphere, torus


@pytest.fixture(scope="module")
def octant():
    M = sphere_stereographic(2, 1.0)
    T = build_triangle(M, [1.0, 0.0], [0.0, 1.0], [0.0, 0.0])
    return M, T, triangle_report(M, T)


def test_euclidean_triangle_angles():
    T = build_triangle(euclidean(2), [0, 0], [1, 0], [0, 1])
    np.testing.assert_allclose(T.angles, [math.pi / 2, math.pi / 4, math.pi / 4], atol=1e-12)


def test_euclidean_report_vanishes():
    M = euclidean(2)
    rep = triangle_report(M, build_triangle(M, [0.1, 0.2], [1.3, -0.4], [0.5, 1.1]))
    assert abs(rep.integral) < 1e-10 and abs(rep.excess) < 1e-10 and abs(rep.holonomy) < 1e-10


def test_octant(octant):
    _, T, rep = octant
    np.testing.assert_allclose(T.angles, [math.pi / 2] * 3, atol=1e-8)
    assert rep.integral == pytest.approx(math.pi / 2, abs=1e-4)
    assert rep.excess == pytest.approx(math.pi / 2, abs=1e-8)
    assert rep.holonomy == pytest.approx(math.pi / 2, abs=1e-4)
    assert rep.area == pytest.approx(math.pi / 2, abs=1e-4)


def test_sides_match_vertices_cyclically(octant):
    _, T, _ = octant
    for i in range(3):
        np.testing.assert_allclose(T.sides[i].x[0], T.vertices[i], atol=1e-8)
        np.testing.assert_allclose(T.sides[i].x[-1], T.vertices[(i + 1) % 3], atol=1e-8)


def test_frames_stay_orthonormal(octant):
    assert octant[2].frame_residual < 1e-8


def test_half_plane_triangle():
    M = poincare_half_plane()
    T = build_triangle(M, [0.0, 1.0], [1.0, 1.0], [0.5, 2.0])
    rep = triangle_report(M, T)
    assert sum(T.angles) < math.pi
    assert rep.excess < 0
    assert abs(rep.integral - rep.excess) < 1e-4
    assert abs(rep.holonomy - abs(rep.excess)) < 1e-4


def test_beltrami_ball_triangle():
    M = beltrami_ball(3)
    rep = triangle_report(M, build_triangle(M, [0.3, 0.0, 0.1], [-0.2, 0.5, 0.0], [0.0, -0.3, 0.6]))
    assert rep.residuals["integral_vs_excess"] < 1e-4
    assert rep.residuals["holonomy_vs_excess"] < 1e-4


def test_large_excess_holonomy_wraps():
    # excess above pi: the rotation angle is only defined modulo 2 pi
    M = sphere_stereographic(2, 1.0)
    T = build_triangle(M, *(0.8 * np.array([math.cos(a), math.sin(a)]) for a in (0.0, 2.1, 4.2)))
    rep = triangle_report(M, T)
    assert rep.excess > math.pi
    assert rep.residuals["holonomy_vs_excess"] < 1e-4
    assert abs(rep.integral - rep.excess) < 1e-4


def test_triangle_around_chart_infinity_rejected():
    # vertices in the far hemisphere: the geodesic triangle contains the point at infinity
    M = sphere_stereographic(2, 1.0)
    T = build_triangle(M, *(2.5 * np.array([math.cos(a), math.sin(a)]) for a in (0.0, 2.1, 4.2)))
    with pytest.raises(DomainError):
        triangle_integral(M, T)


def test_additivity_by_cevian():
    M = poincare_half_plane()
    p, q, r = np.array([-0.6, 0.8]), np.array([0.9, 0.6]), np.array([0.1, 2.2])
    whole = build_triangle(M, p, q, r)
    side = whole.sides[0]
    m = side.x[len(side.x) // 2]
    I = triangle_integral(M, whole)[0]
    I1 = triangle_integral(M, build_triangle(M, p, m, r))[0]
    I2 = triangle_integral(M, build_triangle(M, m, q, r))[0]
    assert abs(I1 + I2 - I) < 1e-4


def test_collinear_rejected():
    with pytest.raises(DegenerateError):
        build_triangle(euclidean(2), [0, 0], [1, 1], [2, 2])


def test_report_serializes(octant):
    d = octant[2].to_dict()
    assert set(d) >= {"integral", "excess", "holonomy", "residuals"}


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_sphere_total_curvature(R):
    res, total = total_curvature_closed(sphere(R), 2)
    assert res < 1e-4 and total == pytest.approx(4 * math.pi, abs=1e-4)


def test_torus_total_curvature():
    res, total = total_curvature_closed(torus(2.0, 1.0), 0)
    assert res < 1e-4


def test_ellipsoid_total_curvature():
    a, b, c = 1.0, 1.5, 0.7
    S = ParametricSurface(
        S=lambda u, v: np.stack(np.broadcast_arrays(a * np.sin(u) * np.cos(v), b * np.sin(u) * np.sin(v), c * np.cos(u)), -1),
        rect=(0.0, math.pi, 0.0, 2 * math.pi), name="ellipsoid",
    )
    res, _ = total_curvature_closed(S, 2)
    assert res < 1e-4


@pytest.mark.parametrize("S", [plane(), cylinder(1.0)], ids=["plane", "cylinder"])
def test_open_surface_rejected(S):
    with pytest.raises(GeometryError):
        total_curvature_closed(S, 0)


@pytest.mark.parametrize("v, e, f, chi", [(6, 12, 8, 2), (12, 30, 20, 2), (9, 27, 18, 0), (4, 6, 4, 2)])
def test_euler_characteristic(v, e, f, chi):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert euler_characteristic(v, e, f) == chi


def test_euler_characteristic_warns():
    with pytest.warns(UserWarning):
        assert euler_characteristic(8, 12, 6) == 2
    assert euler_characteristic(8, 12, 6, triangulation=False) == 2
    with pytest.raises(GeometryError):
        euler_characteristic(-1, 0, 0)
