"""Winding and rotation numbers, signed area, self-intersections and linking numbers."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomkit.errors import DegenerateError, GeometryError
from geomkit.topology import (
    FourierCurve,
    PolyCurve,
    circle,
    figure_eight,
    hopf_link,
    linking_number,
    meister_decomposition,
    power_image,
    random_fourier_curve,
    rotation_invariants,
    self_intersections,
    signed_area,
    smooth_total_curvature,
    space_circle,
    trefoil_projection,
    winding_number,
)


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@pytest.mark.parametrize("curve, p0, w", [
    (circle(), (0.0, 0.0), 1),
    (circle(), (2.0, 0.0), 0),
    (circle(ccw=False), (0.0, 0.0), -1),
    (power_image(), (0.0, 0.0), 2),
    (power_image(power=3, radius=1.5), (0.0, 0.0), 3),
    (figure_eight(), (0.5, 0.3), 1),
    (figure_eight(), (0.5, -0.3), -1),
    (figure_eight(), (0.5, 0.0), 0),
], ids=["circle_in", "circle_out", "cw", "z2", "z3", "eight_up", "eight_down", "eight_gap"])
def test_winding_number(curve, p0, w):
    assert winding_number(curve, p0) == w


def test_winding_on_curve_rejected():
    with pytest.raises(DegenerateError):
        winding_number(figure_eight(), (0.0, 0.0))


@pytest.mark.parametrize("curve, R", [
    (circle(), 1), (circle(ccw=False), -1), (figure_eight(), 0), (power_image(), 2), (trefoil_projection(), 2),
], ids=["circle", "cw", "eight", "z2", "trefoil"])
def test_rotation_number(curve, R):
    r, total = rotation_invariants(curve)
    assert r == R
    assert abs(total - 2 * math.pi * R) < 1e-6


def test_cusp_rejected():
    with pytest.raises(DegenerateError):
        rotation_invariants(PolyCurve(np.array([[0, 0], [1, 0], [0.5, 0], [0.5, 1.0]])))


def test_smooth_total_curvature_circle():
    d = lambda t: (-np.sin(t), np.cos(t), -np.cos(t), -np.sin(t))  # noqa: E731
    assert abs(smooth_total_curvature(d) - 2 * math.pi) < 1e-12


def test_fourier_curve_total_curvature(rng):
    c = random_fourier_curve(rng)
    R, _ = rotation_invariants(c.sample(4096))
    assert abs(smooth_total_curvature(c.derivatives) - 2 * math.pi * R) < 1e-6


def test_signed_area_circle():
    area, res = signed_area(circle(512))
    assert area == pytest.approx(math.pi, abs=1e-3)
    a_cw, _ = signed_area(circle(512, ccw=False))
    assert a_cw == pytest.approx(-math.pi, abs=1e-3)
    assert res < 1e-3


def test_signed_area_figure_eight():
    area, res = signed_area(figure_eight())
    assert abs(area) < 1e-3 and res < 1e-3


def test_meister_residual_shrinks():
    c = power_image()
    area = signed_area(c)[0]
    gaps = []
    for n in (64, 128, 256):
        far, near, bound = meister_decomposition(c, n)
        gaps.append(abs(area - far - near))
        assert abs(near) <= bound + 1e-12
    assert gaps[-1] < gaps[0]
    assert area == pytest.approx(32 * math.pi, rel=1e-3)  # z^2 covers the disk of radius 4 twice


@pytest.mark.parametrize("curve, n", [
    (circle(), 0), (figure_eight(), 1), (trefoil_projection(), 3),
], ids=["circle", "eight", "trefoil"])
def test_self_intersections(curve, n):
    count, pts = self_intersections(curve)
    assert count == n and len(pts) == n


def test_doubly_traced_circle_is_not_generic():
    with pytest.raises(DegenerateError):
        self_intersections(power_image())


def test_figure_eight_crossing_location():
    _, pts = self_intersections(figure_eight())
    np.testing.assert_allclose(pts[0], [0.0, 0.0], atol=1e-9)


def test_triple_point_rejected():
    # three-petal rose r = cos 3t passes through the origin three times
    t = 2 * np.pi * np.arange(600) / 600 + 0.001
    r = np.cos(3 * t)
    rose = PolyCurve(np.column_stack([r * np.cos(t), r * np.sin(t)]))
    with pytest.raises(DegenerateError):
        self_intersections(rose)


@pytest.mark.parametrize("curve", [circle(), figure_eight(), trefoil_projection()],
                         ids=["circle", "eight", "trefoil"])
def test_gauss_inequality_canonical(curve):
    R, _ = rotation_invariants(curve)
    assert self_intersections(curve)[0] >= abs(abs(R) - 1)


@settings(max_examples=10)
@given(st.integers(0, 2 ** 32 - 1))
def test_gauss_inequality_random(seed):
    c = random_fourier_curve(np.random.default_rng(seed)).sample(1024)
    R, _ = rotation_invariants(c)
    n, _ = self_intersections(c)
    assert n >= abs(abs(R) - 1)


@given(st.floats(0, 2 * math.pi), st.floats(-5, 5), st.floats(-5, 5))
def test_rigid_motion_invariance(theta, bx, by):
    c = power_image(128)
    moved = c.transformed(_rotation(theta), [bx, by])
    p0 = np.array([0.1, 0.05])
    p1 = _rotation(theta) @ p0 + [bx, by]
    assert winding_number(moved, p1) == winding_number(c, p0)
    assert rotation_invariants(moved)[0] == rotation_invariants(c)[0]
    assert signed_area(moved, n_max=64)[0] == pytest.approx(signed_area(c, n_max=64)[0], rel=1e-9)


def test_reflection():
    c = power_image(128)
    F = np.diag([1.0, -1.0])
    m = c.transformed(F)
    assert rotation_invariants(m)[0] == -rotation_invariants(c)[0]
    assert signed_area(m, n_max=64)[0] == pytest.approx(-signed_area(c, n_max=64)[0], rel=1e-12)
    assert abs(winding_number(m, (0.1, -0.05))) == abs(winding_number(c, (0.1, 0.05)))


@pytest.mark.parametrize("curve", [figure_eight(64), power_image(64), trefoil_projection(96)],
                         ids=["eight", "z2", "trefoil"])
def test_refinement_invariance(curve):
    fine = curve.refined()
    assert len(fine) == 2 * len(curve)
    assert rotation_invariants(fine)[0] == rotation_invariants(curve)[0]
    assert winding_number(fine, (0.3, 0.1)) == winding_number(curve, (0.3, 0.1))


def test_hopf_link():
    a, b = hopf_link()
    m, raw = linking_number(a, b)
    assert abs(m) == 1
    assert abs(abs(raw) - 4 * math.pi) < 0.01 * 4 * math.pi
    assert linking_number(b, a)[0] == m
    assert linking_number(a.reversed(), b)[0] == -m
    assert linking_number(a.refined(), b)[0] == m


def test_unlinked_far_circles():
    a = space_circle(128)
    b = space_circle(128, center=(5.0, 0.0, 0.0), normal_axis=1)
    assert linking_number(a, b)[0] == 0


def test_linking_too_close():
    a = space_circle(64)
    with pytest.raises(DegenerateError):
        linking_number(a, a.transformed(np.eye(3), [0.0, 0.0, 1e-8]))


def test_linking_needs_space_curves():
    with pytest.raises(GeometryError):
        linking_number(circle(), circle(center=(3, 0)))


def test_json_roundtrip(tmp_path):
    c = figure_eight(64)
    path = tmp_path / "eight.json"
    c.save(path)
    data = json.loads(path.read_text())
    assert data["closed"] is True and len(data["points"]) == 64
    back = PolyCurve.load(path)
    np.testing.assert_array_equal(back.points, c.points)


@pytest.mark.parametrize("text", ['{"closed": true}', '{"points": [[0, 0], [1, 0]], "closed": true}', "[1, 2", '{"points": [[0, "a"]]}'])
def test_malformed_json(text):
    with pytest.raises(GeometryError):
        PolyCurve.from_json(text)


def test_polycurve_validation():
    with pytest.raises(DegenerateError):
        PolyCurve(np.array([[0, 0], [0, 0], [1, 1]]))
    with pytest.raises(GeometryError):
        PolyCurve(np.zeros((5, 4)))


def test_fourier_curve_sampling():
    c = FourierCurve(np.array([1.0]), np.array([0.0]), np.array([0.0]), np.array([1.0]))
    P = c.sample(100)
    np.testing.assert_allclose(np.linalg.norm(P.points, axis=1), 1.0, atol=1e-14)
