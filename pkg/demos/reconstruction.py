"""Reconstruct curves from curvature profiles and check the round trip.

A constant profile ``k = 0, eps = 1`` closes up into an ellipse; the
profile ``k = -sqrt(2), M = sqrt(2), eps = -1`` gives the space curve mk,
which lies in a linear complex.

Run with ``python3 demos/reconstruction.py``.
"""

import math

import numpy as np

from gacurves.reconstruct import plane_profile, reconstruct, space_profile
from gacurves.space import scan_space


def main() -> None:
    ellipse = reconstruct(plane_profile("0", 1, (0.0, 2 * math.pi)), n=201)
    print("ellipse: k error", ellipse.roundtrip.k_error,
          "closing gap", np.linalg.norm(ellipse.x[-1] - ellipse.x[0]))

    varying = reconstruct(plane_profile("-4 + t", 1, (0.0, 1.0)), n=51)
    print("k = -4 + t: k error", varying.roundtrip.k_error)

    mk = reconstruct(space_profile(-math.sqrt(2), math.sqrt(2), -1, (0.0, 1.0)), n=81)
    scan = scan_space(mk.curve_spec(), np.linspace(0.05, 0.95, 19))
    print("mk: k error", mk.roundtrip.k_error, "M error", mk.roundtrip.M_error,
          "sup theta3", scan.theta3_sup)


if __name__ == "__main__":
    main()
