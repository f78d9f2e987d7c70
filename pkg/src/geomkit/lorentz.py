"""Lorentz boosts: construction, action on events, composition and the Galilei limit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

__all__ = [
    "Boost",
    "Event",
    "boost_from_velocity",
    "apply",
    "interval",
    "as_matrix",
    "compose",
    "induced_velocity",
    "galilei_limit",
    "galilei_decay",
    "velocity_addition",
]


@dataclass(frozen=True)
class Event:
    """Spatial position ``x`` (3-vector) and time ``t``."""

    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(3)
        if not (np.all(np.isfinite(x)) and math.isfinite(self.t)):
            raise GeometryError("event coordinates must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class Boost:
    """``y = A (x - t v) + b`` and ``s = sign (gamma t - gamma v.x / c^2) + t0``.

    ``sign = +1`` is the orthochronous branch.
    """

    v: np.ndarray
    A: np.ndarray
    b: np.ndarray
    t0: float = 0.0
    c: float = 1.0
    sign: int = 1

    @property
    def gamma(self) -> float:
        v2 = float(self.v @ self.v)
        return 1.0 / math.sqrt(1.0 - v2 / self.c ** 2)

    def constraint_residual(self) -> float:
        """Max entry of ``A^T A - I - (|v|^2/(c^2 - |v|^2)) P_v``."""
        v2 = float(self.v @ self.v)
        P = np.outer(self.v, self.v) / v2 if v2 > 0 else np.zeros((3, 3))
        R = self.A.T @ self.A - np.eye(3) - (v2 / (self.c ** 2 - v2)) * P
        return float(np.max(np.abs(R)))


def boost_from_velocity(v, c=1.0, b=None, t0=0.0, sign=1) -> Boost:
    """Rotation-free boost ``A = I + (gamma - 1) P_v`` with ``P_v`` the projection onto ``v``.

    Raises
    ------
    GeometryError
        If ``|v| >= c`` or ``c <= 0``.
    """
    v = np.asarray(v, dtype=float).reshape(3)
    c = float(c)
    if not c > 0:
        raise GeometryError("speed of light must be positive")
    v2 = float(v @ v)
    if not v2 < c * c:
        raise GeometryError(f"relative speed {math.sqrt(v2)!r} is not below c = {c!r}")
    if sign not in (1, -1):
        raise GeometryError("sign must be +1 or -1")
    gamma = 1.0 / math.sqrt(1.0 - v2 / (c * c))
    P = np.outer(v, v) / v2 if v2 > 0 else np.zeros((3, 3))
    A = np.eye(3) + (gamma - 1.0) * P
    b = np.zeros(3) if b is None else np.asarray(b, float).reshape(3)
    return Boost(v=v, A=A, b=b, t0=float(t0), c=c, sign=sign)


def apply(B: Boost, e: Event) -> Event:
    """Image of the event ``e`` under ``B``."""
    g = B.gamma
    y = B.A @ (e.x - e.t * B.v) + B.b
    s = B.sign * (g * e.t - g * float(B.v @ e.x) / B.c ** 2) + B.t0
    return Event(y, s)


def interval(e1: Event, e2: Event, c=1.0) -> float:
    """``|x2 - x1|^2 - c^2 (t2 - t1)^2``."""
    dx = e2.x - e1.x
    return float(dx @ dx - c * c * (e2.t - e1.t) ** 2)


def as_matrix(B: Boost) -> np.ndarray:
    """Homogeneous 5x5 matrix acting on ``(x, t, 1)``."""
    g = B.gamma
    L = np.zeros((5, 5))
    L[:3, :3] = B.A
    L[:3, 3] = -B.A @ B.v
    L[:3, 4] = B.b
    L[3, :3] = -B.sign * g * B.v / B.c ** 2
    L[3, 3] = B.sign * g
    L[3, 4] = B.t0
    L[4, 4] = 1.0
    return L


def compose(B1: Boost, B2: Boost) -> np.ndarray:
    """Homogeneous matrix of ``B1`` after ``B2``."""
    return as_matrix(B1) @ as_matrix(B2)


def induced_velocity(L) -> np.ndarray:
    """Velocity ``w`` of the frame map ``L``: the worldline ``x = w t`` is sent to ``y = const``."""
    L = np.asarray(L, float)
    return -np.linalg.solve(L[:3, :3], L[:3, 3])


def velocity_addition(u, v, c=1.0) -> float:
    """Relativistic sum of colinear speeds ``(u + v)/(1 + uv/c^2)``."""
    return (u + v) / (1.0 + u * v / c ** 2)


def galilei_limit(v, A=None, b=None, t0=0.0, sign=1):
    """Galilei map ``(x, t) -> (A (x - t v) + b, sign t + t0)`` as a callable on events."""
    v = np.asarray(v, dtype=float).reshape(3)
    A = np.eye(3) if A is None else np.asarray(A, float)
    if np.max(np.abs(A.T @ A - np.eye(3))) > 1e-10:
        raise GeometryError("Galilei map needs an orthogonal A")
    b = np.zeros(3) if b is None else np.asarray(b, float).reshape(3)

    def G(e: Event) -> Event:
        return Event(A @ (e.x - e.t * v) + b, sign * e.t + t0)

    return G


def galilei_decay(v, c_values=(10.0, 100.0, 1000.0), n=5):
    """Sup-norm gap between boost and Galilei images on an ``n^4`` grid in the unit event box.

    Returns one gap per value of ``c``; the gaps shrink like ``c^-2``.
    """
    v = np.asarray(v, dtype=float)
    G = galilei_limit(v)
    grid = np.linspace(-1.0, 1.0, n)
    out = []
    for c in c_values:
        B = boost_from_velocity(v, c)
        worst = 0.0
        for x1 in grid:
            for x2 in grid:
                for x3 in grid:
                    for t in grid:
                        e = Event(np.array([x1, x2, x3]), t)
                        p, q = apply(B, e), G(e)
                        worst = max(worst, float(np.max(np.abs(p.x - q.x))), abs(p.t - q.t))
        out.append(worst)
    return np.array(out)
