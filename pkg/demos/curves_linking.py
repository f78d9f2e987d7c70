"""Plane-curve invariants and the linking integral.

Winding number, rotation number, signed area and crossing count for a few
closed polygons, followed by the Gauss linking integral of the Hopf link
and of two unlinked circles.

Run with ``python3 demos/curves_linking.py``.
"""

from geomkit.topology import (
    circle,
    figure_eight,
    hopf_link,
    linking_number,
    power_image,
    rotation_invariants,
    self_intersections,
    signed_area,
    space_circle,
    trefoil_projection,
    winding_number,
)
from geomkit.errors import DegenerateError


def main():
    curves = {
        "circle": circle(),
        "reversed circle": circle(ccw=False),
        "figure eight": figure_eight(),
        "trefoil shadow": trefoil_projection(),
        "z^2 image": power_image(),
    }
    for name, c in curves.items():
        R, _ = rotation_invariants(c)
        area, _ = signed_area(c)
        try:
            crossings = self_intersections(c)[0]
        except DegenerateError:
            crossings = "traced twice"
        w = winding_number(c, [0.05, 0.02])
        print(f"{name:16s} winding={w:+d} rotation={R:+d} area={area:+.5f} crossings={crossings}")

    m, raw = linking_number(*hopf_link())
    print(f"\nHopf link: integral {raw:.6f}, linking number {m}")
    a = space_circle(center=(0.0, 0.0, 0.0))
    b = space_circle(center=(5.0, 0.0, 0.0))
    m, raw = linking_number(a, b)
    print(f"separate circles: integral {raw:.2e}, linking number {m}")


if __name__ == "__main__":
    main()
