"""Lorentz boosts, interval invariance, composition and the Galilei limit."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geomkit.errors import GeometryError
from geomkit.lorentz import (
    Event,
    apply,
    as_matrix,
    boost_from_velocity,
    compose,
    galilei_decay,
    galilei_limit,
    induced_velocity,
    interval,
    velocity_addition,
)

speed = st.floats(-0.95, 0.95)


def _random_velocity(rng, c=1.0):
    v = rng.normal(size=3)
    return v * rng.uniform(0, 0.95 * c) / np.linalg.norm(v)


def test_zero_velocity_identity():
    B = boost_from_velocity([0, 0, 0])
    assert np.array_equal(B.A, np.eye(3))
    e = Event([1.0, 2.0, 3.0], 4.0)
    out = apply(B, e)
    assert np.array_equal(out.x, e.x) and out.t == e.t


def test_known_boost():
    B = boost_from_velocity([0.6, 0, 0])
    assert B.gamma == pytest.approx(1.25)
    np.testing.assert_allclose(B.A, np.diag([1.25, 1, 1]), atol=1e-15)
    out = apply(B, Event([1.0, 0, 0], 0.0))
    np.testing.assert_allclose(out.x, [1.25, 0, 0], atol=1e-15)
    assert out.t == pytest.approx(-0.75, abs=1e-15)


@pytest.mark.parametrize("c", [1.0, 3.0, 299792458.0])
def test_constraints(c, rng):
    for _ in range(100):
        B = boost_from_velocity(_random_velocity(rng, c), c)
        assert B.constraint_residual() < 1e-12 * max(1.0, B.gamma ** 2)
        assert abs(abs(np.linalg.det(B.A)) - B.gamma) < 1e-12 * B.gamma


def test_interval_invariance(rng):
    for _ in range(100):
        B = boost_from_velocity(_random_velocity(rng), b=rng.normal(size=3), t0=rng.normal())
        e1, e2 = (Event(rng.normal(size=3), rng.normal()) for _ in range(2))
        before = interval(e1, e2)
        after = interval(apply(B, e1), apply(B, e2))
        assert abs(after - before) < 1e-10 * max(1.0, abs(before))


@given(speed, speed)
def test_colinear_composition(u, w):
    L = compose(boost_from_velocity([u, 0, 0]), boost_from_velocity([w, 0, 0]))
    v = induced_velocity(L)
    assert v[0] == pytest.approx(velocity_addition(u, w), abs=1e-10)
    B = boost_from_velocity(v)
    assert np.max(np.abs(L[:3, :3] - B.A)) < 1e-9


def test_group_property(rng):
    B1, B2 = (boost_from_velocity(_random_velocity(rng), b=rng.normal(size=3)) for _ in range(2))
    e = Event(rng.normal(size=3), rng.normal())
    twice = apply(B1, apply(B2, e))
    hom = compose(B1, B2) @ np.concatenate([e.x, [e.t, 1.0]])
    np.testing.assert_allclose(hom[:3], twice.x, atol=1e-12)
    assert hom[3] == pytest.approx(twice.t, abs=1e-12)


def test_matrix_form_matches_apply(rng):
    B = boost_from_velocity(_random_velocity(rng), b=[1, 2, 3], t0=0.5)
    e = Event(rng.normal(size=3), 0.7)
    out = as_matrix(B) @ np.concatenate([e.x, [e.t, 1.0]])
    np.testing.assert_allclose(out[:3], apply(B, e).x, atol=1e-14)


@pytest.mark.parametrize("v", [[1.0, 0, 0], [0.8, 0.7, 0.0], [2.0, 0, 0]])
def test_superluminal_rejected(v):
    with pytest.raises(GeometryError):
        boost_from_velocity(v)


def test_negative_sign_branch():
    B = boost_from_velocity([0.3, 0, 0], sign=-1)
    e1, e2 = Event([0.1, 0, 0], 0.2), Event([1.0, 2, 0], -1.0)
    assert interval(apply(B, e1), apply(B, e2)) == pytest.approx(interval(e1, e2), abs=1e-12)
    assert apply(B, Event([0, 0, 0], 1.0)).t < 0


def test_galilei_map():
    G = galilei_limit([0.5, 0, 0])
    out = G(Event([1.0, 0, 0], 1.0))
    np.testing.assert_allclose(out.x, [0.5, 0, 0])
    assert out.t == 1.0
    out = galilei_limit([0, 0, 0])(Event([1.0, 2.0, 3.0], 4.0))
    np.testing.assert_array_equal(out.x, [1.0, 2.0, 3.0])


def test_galilei_rejects_non_orthogonal():
    with pytest.raises(GeometryError):
        galilei_limit([0, 0, 0], A=np.diag([2.0, 1.0, 1.0]))


@pytest.mark.parametrize("v", [[0.5, 0, 0], [0.2, -0.3, 0.1]])
def test_galilei_decay(v):
    gaps = galilei_decay(v)
    ratios = gaps[:-1] / gaps[1:]
    assert np.all(np.abs(ratios / 100 - 1) < 0.2)


def test_event_must_be_finite():
    with pytest.raises(GeometryError):
        Event([np.nan, 0, 0], 0.0)
