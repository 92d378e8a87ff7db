"""Graph with prescribed curvature from the Abel equation.

Solves for a graph whose general-affine curvature, as a function of
``x = 1 / f''^(2/3)``, is ``k = -4.5 + 0.3 x`` and reports the round trip.

Run with ``python3 demos/abel_graph.py``.
"""

from gacurves import AbelProblem, abel_solve


def main() -> None:
    res = abel_solve(AbelProblem(k="-4.5 + 0.3*x", eps=1, x0=1.0, s0=0.8, x1=1.6, n=13))
    print("   x          t          f")
    for x, t, f in zip(res.x, res.t, res.f):
        print(f"{x:8.4f} {t:10.6f} {f:10.6f}")
    print("curvature round-trip error:", res.roundtrip.k_error)


if __name__ == "__main__":
    main()
