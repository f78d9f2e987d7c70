"""Geodesic triangles on the sphere and in the hyperbolic plane.

For each triangle the interior angles, the curvature integral and the
holonomy of a transported vector around the boundary are compared.  On the
unit sphere the angle sum exceeds pi by the enclosed area; in the half-plane
it falls short by the same amount.

Run with ``python3 demos/triangles.py``.
"""

import math

from geomkit import build_triangle, poincare_half_plane, sphere_stereographic, triangle_report

CASES = [
    ("sphere, small", sphere_stereographic(), [0.0, 0.0], [0.2, 0.0], [0.0, 0.2]),
    ("sphere, octant", sphere_stereographic(), [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]),
    ("half-plane", poincare_half_plane(), [0.0, 1.0], [1.0, 1.0], [0.3, 2.0]),
    ("half-plane, wide", poincare_half_plane(), [-2.0, 0.5], [2.0, 0.5], [0.0, 3.0]),
]


def main():
    print(f"{'case':18s} {'angle sum':>10s} {'excess':>11s} {'int K dA':>11s} {'holonomy':>10s}")
    for name, M, p, q, r in CASES:
        T = build_triangle(M, p, q, r)
        rep = triangle_report(M, T)
        print(f"{name:18s} {T.angles.sum():10.6f} {rep.excess:11.3e} "
              f"{rep.integral:11.3e} {rep.holonomy_signed:10.6f}")
    # the octant has three right angles, so its excess is exactly pi/2
    print(f"\noctant excess should be pi/2 = {math.pi / 2:.6f}")


if __name__ == "__main__":
    main()
