"""Extremality residuals and catalog lookups.

Checks that ``k = 3 sqrt(2) tanh(sqrt(2) t)`` solves the plane
extremality equation while a 1% perturbation does not, then classifies a
few constant invariants.

Run with ``python3 demos/extremal_and_classify.py``.
"""

import math

from gacurves import (
    classify_plane_constant,
    classify_projective_constant,
    classify_space_constant,
    ga_plane_residual,
)


def main() -> None:
    for k in ("3*sqrt(2)*tanh(sqrt(2)*t)", "3.03*sqrt(2)*tanh(sqrt(2)*t)"):
        rep = ga_plane_residual(k, 1, (-2.0, 2.0, 201))
        print(f"{k:30s} sup residual {rep.sup_norm:.2e} extremal: {rep.verdict}")

    print("k = -4, eps = 1:", classify_plane_constant(-4.0, 1).family)
    print("k = -sqrt(2), M = sqrt(2), eps = -1:", classify_space_constant(-math.sqrt(2), math.sqrt(2), -1).family)
    c = classify_projective_constant(6.0, -8.0, 3.0)
    print("projective (6, -8, 3):", c.family, c.parameters)


if __name__ == "__main__":
    main()
