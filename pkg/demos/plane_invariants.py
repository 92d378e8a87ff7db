"""Invariants of plane curves: log spiral, catenary and a rose.

Prints the general-affine curvature of a logarithmic spiral, the affine
inflections of the catenary and the events of the rose ``r = cos(t/3)``,
and writes an SVG drawing of the rose with its events marked.

Run with ``python3 demos/plane_invariants.py [output.svg]``.
"""

import sys

import numpy as np

from gacurves import builtin, scan_curve
from gacurves.io import emit_svg


def main(out: str = "rose.svg") -> None:
    spiral = scan_curve(builtin("log-spiral", gamma=1.0, alpha=1.0), np.linspace(0.0, 6.0, 7))
    print("log spiral k:", sorted({round(r.k, 9) for r in spiral.records if r.k is not None}))

    cat = scan_curve(builtin("catenary"), np.linspace(-2.0, 2.0, 401))
    print("catenary inflections:", [round(e.t, 6) for e in cat.events_of("inflection")])

    rose_spec = builtin("rose")
    rose = scan_curve(rose_spec, 601)
    for e in rose.events:
        print(f"rose {e.kind:10s} t = {e.t:.6f}")
    print("total curvature:", rose.total_curvature)

    t = np.linspace(*rose_spec.interval, 601)
    marks = [(*rose_spec.points(np.array([e.t]))[0], e.kind) for e in rose.events]
    with open(out, "w") as fh:
        fh.write(emit_svg(rose_spec.points(t), marks, title="rose n = 1/3"))
    print("wrote", out)


if __name__ == "__main__":
    main(*sys.argv[1:])
