"""Invariants of space curves: helix, the curve mk and Viviani's curve.

Shows constant invariants on the helix and on ``mk``, the linear complex
test, and the two affine inflections of Viviani's curve.

Run with ``python3 demos/space_invariants.py``.
"""

import numpy as np

from gacurves import builtin
from gacurves.space import scan_space


def main() -> None:
    for name in ("circular-helix", "mk", "exp3"):
        spec = builtin(name)
        lo, hi = spec.interval
        scan = scan_space(spec, np.linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), 41))
        r = scan.records[20]
        print(f"{name:15s} eps={r.eps:+d} k={r.k:+.6f} M={r.M:+.6f} "
              f"linear complex: {scan.linear_complex} (sup theta3 {scan.theta3_sup:.2e})")

    viviani = scan_space(builtin("viviani"), np.linspace(-1.4, 1.4, 281))
    ts = viviani.inflections
    print("Viviani inflections:", [round(t, 6) for t in ts], "cos^2 =", [round(float(np.cos(t) ** 2), 9) for t in ts])


if __name__ == "__main__":
    main()
