"""Unit quaternions as rotations, and Lorentz boosts of events.

Shows the two-to-one map from unit quaternions to rotation matrices, the
120-element binary icosahedral group, and a boost acting on an event while
preserving the spacetime interval.  The last block sends c to infinity and
watches the boost approach a Galilean shift.

Run with ``python3 demos/rotations_boosts.py``.
"""

import math

import numpy as np

from geomkit.lorentz import Event, apply, boost_from_velocity, galilei_decay, interval
from geomkit.quaternion import binary_icosahedral, distinct_rotations, rotation_matrix


def main():
    theta = math.pi / 3
    q = np.array([math.cos(theta / 2), 0.0, 0.0, math.sin(theta / 2)])
    A, _ = rotation_matrix(q)
    print("rotation by 60 degrees about z:\n", np.round(A, 6))
    print("q and -q give the same matrix:", np.array_equal(A, rotation_matrix(-q)[0]))
    G = binary_icosahedral()
    print(f"binary icosahedral group: {len(G)} quaternions, {distinct_rotations(G)} rotations\n")

    B = boost_from_velocity([0.6, 0.0, 0.0])
    origin, e = Event([0.0, 0.0, 0.0], 0.0), Event([1.0, 0.5, 0.0], 2.0)
    img = apply(B, e)
    print(f"gamma = {B.gamma}")
    print(f"event {e.x}, t={e.t} -> {np.round(img.x, 6)}, t={img.t:.6f}")
    print(f"interval before {interval(origin, e):.12f}, after {interval(apply(B, origin), img):.12f}")
    gaps = galilei_decay([0.5, 0.0, 0.0])
    print("distance to the Galilean map for c = 10, 100, 1000:", " ".join(f"{g:.2e}" for g in gaps))


if __name__ == "__main__":
    main()
