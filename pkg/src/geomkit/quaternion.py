"""Quaternion arithmetic, the rotation matrix A(a, b, c, d) and the binary icosahedral group."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError

__all__ = [
    "Quaternion",
    "qmul",
    "rotation_matrix",
    "binary_icosahedral",
    "closure_check",
    "distinct_rotations",
    "GOLDEN",
]

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Quaternion:
    """``a + b i + c j + d k``."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_array(cls, q):
        a, b, c, d = (float(x) for x in q)
        return cls(a, b, c, d)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return qmul(self, other)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        return math.sqrt(self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2)


def _components(q):
    if isinstance(q, Quaternion):
        return q.a, q.b, q.c, q.d
    q = np.asarray(q, dtype=float)
    return q[..., 0], q[..., 1], q[..., 2], q[..., 3]


def qmul(p, q):
    """Quaternion product; accepts :class:`Quaternion` or arrays ``(..., 4)``.

    ``(a1, b1, c1, d1)(a2, b2, c2, d2) = (a1a2 - b1b2 - c1c2 - d1d2,
    a1b2 + b1a2 + c1d2 - d1c2, a1c2 - b1d2 + c1a2 + d1b2, a1d2 + b1c2 - c1b2 + d1a2)``.
    """
    a1, b1, c1, d1 = _components(p)
    a2, b2, c2, d2 = _components(q)
    a = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2
    b = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2
    c = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2
    d = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2
    if isinstance(p, Quaternion) and isinstance(q, Quaternion):
        return Quaternion(float(a), float(b), float(c), float(d))
    return np.stack([a, b, c, d], axis=-1)


def rotation_matrix(q, unit_tol=1e-9):
    """Rotation matrix ``A(a, b, c, d)`` of a unit quaternion.

    Non-unit input is normalized first.  Returns ``(A, normalized)`` where
    ``normalized`` reports whether that happened.

    Raises
    ------
    DegenerateError
        For the zero quaternion.
    """
    a, b, c, d = (np.asarray(x, float) for x in _components(q))
    n = np.sqrt(a * a + b * b + c * c + d * d)
    if np.any(n == 0):
        raise DegenerateError("zero quaternion has no rotation")
    normalized = bool(np.any(np.abs(n - 1.0) > unit_tol))
    if normalized:
        a, b, c, d = a / n, b / n, c / n, d / n
    A = np.stack([
        np.stack([a * a - b * b - c * c + d * d, -2 * (a * b + c * d), 2 * (b * d - a * c)], -1),
        np.stack([2 * (a * b - c * d), a * a - b * b + c * c - d * d, -2 * (a * d + b * c)], -1),
        np.stack([2 * (a * c + b * d), 2 * (a * d - b * c), a * a + b * b - c * c - d * d], -1),
    ], -2)
    return A, normalized


def _even_permutations(n=4):
    out = []
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        if inversions % 2 == 0:
            out.append(perm)
    return out


def binary_icosahedral() -> np.ndarray:
    """The 120 unit quaternions of the binary icosahedral group, shape ``(120, 4)``.

    The 24 Hurwitz units ``+-1, +-i, +-j, +-k, (+-1 +-i +-j +-k)/2`` together
    with the 96 even coordinate permutations of ``(0, +-1, +-1/phi, +-phi)/2``.
    """
    elems = []
    for k in range(4):
        for s in (1.0, -1.0):
            e = np.zeros(4)
            e[k] = s
            elems.append(e)
    for signs in itertools.product((0.5, -0.5), repeat=4):
        elems.append(np.array(signs))
    base = np.array([0.0, 1.0, 1.0 / GOLDEN, GOLDEN]) / 2.0
    for signs in itertools.product((1.0, -1.0), repeat=3):
        v = base * np.array((1.0,) + signs)
        for perm in _even_permutations():
            w = np.empty(4)
            w[list(perm)] = v
            elems.append(w)
    return np.array(elems)


def _match(candidates, group, tol):
    d = np.linalg.norm(candidates[:, None, :] - group[None, :, :], axis=-1)
    nearest = d.min(axis=1)
    return nearest <= tol


def closure_check(group=None, tol=1e-9) -> bool:
    """True when every product of two elements lies in ``group`` (nearest-neighbour match)."""
    G = binary_icosahedral() if group is None else np.asarray(group, float)
    prods = qmul(G[:, None, :], G[None, :, :]).reshape(-1, 4)
    return bool(np.all(_match(prods, G, tol)))


def distinct_rotations(group=None, tol=1e-9) -> int:
    """Number of distinct rotation matrices in the image of ``group``."""
    G = binary_icosahedral() if group is None else np.asarray(group, float)
    A, _ = rotation_matrix(G)
    flat = A.reshape(len(G), 9)
    reps = []
    for m in flat:
        if not any(np.max(np.abs(m - r)) <= tol for r in reps):
            reps.append(m)
    return len(reps)
