"""Quaternion product, rotation matrices and the binary icosahedral group."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geomkit.errors import DegenerateError
from geomkit.quaternion import (
    GOLDEN,
    Quaternion,
    binary_icosahedral,
    closure_check,
    distinct_rotations,
    qmul,
    rotation_matrix,
)

ONE, I, J, K = (Quaternion(*row) for row in np.eye(4))
quat = arrays(np.float64, 4, elements=st.floats(-10, 10))


def test_hamilton_units():
    assert I * J == K and J * K == I and K * I == J
    assert J * I == -K
    assert I * I == -ONE and J * J == -ONE and K * K == -ONE
    assert qmul(I * J, K) == -ONE


def test_array_product_matches_dataclass(rng):
    p, q = rng.normal(size=(2, 4))
    assert Quaternion.from_array(qmul(p, q)) == Quaternion.from_array(p) * Quaternion.from_array(q)


@given(quat)
def test_identity(q):
    assert np.array_equal(qmul(ONE.as_array(), q), q)
    assert np.array_equal(qmul(q, ONE.as_array()), q)


def test_norm_multiplicative(rng):
    p, q = rng.normal(size=(2, 1000, 4))
    rel = np.linalg.norm(qmul(p, q), axis=1) / (np.linalg.norm(p, axis=1) * np.linalg.norm(q, axis=1)) - 1
    assert np.max(np.abs(rel)) < 1e-12


def test_associative(rng):
    p, q, r = rng.normal(size=(3, 500, 4))
    assert np.max(np.abs(qmul(qmul(p, q), r) - qmul(p, qmul(q, r)))) < 1e-12 * 100


def test_conjugate_gives_norm():
    q = Quaternion(1.0, -2.0, 0.5, 3.0)
    prod = q * q.conjugate()
    assert prod.a == pytest.approx(q.norm() ** 2) and (prod.b, prod.c, prod.d) == (0.0, 0.0, 0.0)


def test_identity_rotation():
    A, normalized = rotation_matrix(ONE)
    assert np.array_equal(A, np.eye(3)) and not normalized


@pytest.mark.parametrize("theta", [0.3, 1.0, math.pi / 2, 2.5, math.pi])
def test_half_angle_rotation(theta):
    A, _ = rotation_matrix([math.cos(theta / 2), math.sin(theta / 2), 0, 0])
    assert np.trace(A) == pytest.approx(1 + 2 * math.cos(theta), abs=1e-14)
    assert np.max(np.abs(A.T @ A - np.eye(3))) < 1e-10
    assert np.linalg.det(A) == pytest.approx(1.0, abs=1e-10)


def test_homomorphism(rng):
    p, q = rng.normal(size=(2, 1000, 4))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    lhs = rotation_matrix(p)[0] @ rotation_matrix(q)[0]
    assert np.max(np.abs(lhs - rotation_matrix(qmul(p, q))[0])) < 1e-10


@given(quat)
def test_double_cover(q):
    if np.linalg.norm(q) < 1e-3:
        return
    assert np.array_equal(rotation_matrix(q)[0], rotation_matrix(-q)[0])


def test_normalization_flag():
    A, normalized = rotation_matrix([2.0, 0.0, 0.0, 0.0])
    assert normalized and np.allclose(A, np.eye(3))
    with pytest.raises(DegenerateError):
        rotation_matrix([0.0, 0.0, 0.0, 0.0])


def test_binary_icosahedral_group():
    G = binary_icosahedral()
    assert G.shape == (120, 4)
    np.testing.assert_allclose(np.linalg.norm(G, axis=1), 1.0, atol=1e-15)
    d = np.linalg.norm(G[:, None] - G[None], axis=-1)
    assert np.min(d[~np.eye(120, dtype=bool)]) > 0.5
    assert any(np.array_equal(g, [-1, 0, 0, 0]) for g in G)
    assert closure_check(G)
    assert distinct_rotations(G) == 60


def test_closure_detects_missing_element():
    assert not closure_check(binary_icosahedral()[1:])


def test_golden_ratio():
    assert GOLDEN == (1 + math.sqrt(5)) / 2
    assert GOLDEN ** 2 == pytest.approx(GOLDEN + 1, abs=1e-15)
