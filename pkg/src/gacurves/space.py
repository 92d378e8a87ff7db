"""General-affine, equiaffine and projective invariants of space curves.

A nondegenerate space curve satisfies ``x'''' = a x''' + b x'' + c x'``
with coefficients obtained from a 3x3 solve in the jet ring.  From them:

* ``L = -(b + 11 a^2/36 - 2 a'/3)``, ``eps = sign(L)``, ``ds = sqrt|L| dt``;
* the first general-affine curvature
  ``k = -(1/3) (a - 3 L'/L) / sqrt|L|``;
* the normalized torsion
  ``m/lambda^3 = -c - ab/6 - a^3/36 + a''/6 - a a'/12 + a^3/216`` and the
  second general-affine curvature ``M = (m/lambda^3) / |L|^(3/2)``;
* projective invariants ``theta3 = (M - eps k)/4`` and
  ``theta4 = -(3/4) k M - M'/2 + eps k'/5 + 3 eps k^2/10 - 9/100``
  (derivatives with respect to general-affine arc length).

Here ``lambda`` is the normalizing factor with ``lambda'/lambda = -a/6``;
like in the plane case it is never integrated, since every reported value
is free of its constant.  Choosing the unimodular normalization
``lambda = |det(x', x'', x''')|^(-1/6)`` gives the equiaffine curvature
``ell = lambda^2 L`` and torsion ``m`` in any parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from .curves import CurveSpec, eval_curve
from .errors import (
    AffineInflectionError,
    CurveEvaluationError,
    DegenerateCurveError,
    GACurveError,
    InsufficientOrderError,
    JetError,
    NotEquiaffineError,
    UsageError,
)
from .jet import DEFAULT_ORDER, Jet, det3, jet_constant, pow_real, solve_linear
from .plane import TOL_DEGENERATE, TOL_SINGULAR, singular_tolerance
from .profiles import Profile, as_profile, profile_jet

__all__ = [
    "TOL_COMPLEX",
    "SpaceInvariantRecord",
    "SpaceScan",
    "space_ode_coeffs",
    "space_invariants_at",
    "space_curvature_routes",
    "equiaffine_space_invariants",
    "equiaffine_arclength",
    "projective_space_invariants",
    "halphen_coefficients",
    "theta_from_halphen",
    "theta_from_ga",
    "scan_space",
    "ga_ode_coefficients",
    "theta_from_ga_halphen",
]

#: sup-norm threshold on theta3 for declaring a linear complex
TOL_COMPLEX = 1e-8


@dataclass(frozen=True)
class SpaceInvariantRecord:
    """Invariants of a space curve at one parameter value.

    ``ell_equi`` and ``m_equi`` are the equiaffine curvature and torsion
    of the unimodular frame; they coincide with ``-b`` and ``-c`` when
    ``t`` is an equiaffine parameter.  ``linear_complex_flag`` is the
    pointwise test ``|theta3| <= tol_complex``; the window-level verdict
    lives in :class:`SpaceScan`.
    """

    t: float
    a: float | None
    b: float | None
    c: float | None
    L: float | None
    eps: int
    ds_dt: float | None
    k: float | None
    M: float | None
    ell_equi: float | None
    m_equi: float | None
    theta3: float | None
    theta4: float | None
    linear_complex_flag: bool = False
    flags: tuple[str, ...] = ()
    dk_ds: float | None = None
    dM_ds: float | None = None

    CSV_FIELDS = ("t", "a", "b", "c", "L", "eps", "ds_dt", "k", "M", "theta3", "theta4", "flags")

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "L": self.L,
            "eps": self.eps,
            "ds_dt": self.ds_dt,
            "k": self.k,
            "M": self.M,
            "ell_equi": self.ell_equi,
            "m_equi": self.m_equi,
            "theta3": self.theta3,
            "theta4": self.theta4,
            "linear_complex_flag": self.linear_complex_flag,
            "flags": list(self.flags),
        }


def _available_order(spec: CurveSpec, order: int) -> int:
    cap = spec.max_order
    return order if cap is None else min(order, cap)


def _frame(spec: CurveSpec, t: float, order: int):
    if spec.dimension != 3:
        raise UsageError("space invariants need a space curve")
    order = _available_order(spec, order)
    if order < 4:
        raise InsufficientOrderError("the space ODE needs fourth derivatives")
    xs = eval_curve(spec, t, order)
    d1 = [x.deriv() for x in xs]
    d2 = [x.deriv() for x in d1]
    d3 = [x.deriv() for x in d2]
    d4 = [x.deriv() for x in d3]
    det = det3(d3, d2, d1)
    n = [math.sqrt(sum(d.value ** 2 for d in dd)) for dd in (d1, d2, d3)]
    if not abs(det.value) > TOL_DEGENERATE * n[0] * n[1] * n[2]:
        raise DegenerateCurveError(
            f"x', x'', x''' are linearly dependent at t = {t!r} (|det| = {abs(det.value):.3e})"
        )
    (a, b, c), _ = solve_linear([d3, d2, d1], d4)
    return a, b, c, det


def space_ode_coeffs(spec: CurveSpec, t: float, order: int = DEFAULT_ORDER) -> tuple[Jet, Jet, Jet]:
    """Coefficients of ``x'''' = a x''' + b x'' + c x'`` as jets at ``t``.

    Raises
    ------
    DegenerateCurveError
        When ``|det(x', x'', x''')| <= 1e-12 |x'| |x''| |x'''|`` (the
        curve is planar to first order).

    Examples
    --------
    >>> from gacurves.curves import builtin
    >>> a, b, c = space_ode_coeffs(builtin("circular-helix"), 0.4)
    >>> round(a.value, 12) + 0.0, round(b.value, 12) + 0.0, round(c.value, 12) + 0.0
    (0.0, -1.0, 0.0)
    """
    a, b, c, _ = _frame(spec, t, order)
    return a, b, c


def _length_density(a: Jet, b: Jet) -> Jet:
    return -(b + (11.0 / 36.0) * a * a - (2.0 / 3.0) * a.deriv())


def _torsion_ratio(a: Jet, b: Jet, c: Jet) -> Jet:
    """``m / lambda^3`` from the lambda ratios of ``lambda'/lambda = -a/6``."""
    a1 = a.deriv()
    a2 = a1.deriv()
    a3 = a * a * a
    return -c - a * b / 6.0 - a3 / 36.0 + a2 / 6.0 - a * a1 / 12.0 + a3 / 216.0


def theta_from_ga(k: float, M: float, dk: float, dM: float, eps: int) -> tuple[float, float]:
    """``theta3, theta4`` from general-affine curvatures and their s-derivatives."""
    th3 = (M - eps * k) / 4.0
    th4 = -0.75 * k * M - 0.5 * dM + eps * dk / 5.0 + 0.3 * eps * k * k - 0.09
    return th3, th4


def halphen_coefficients(p1: Jet, p2: Jet, p3: Jet, p4: Jet) -> tuple[Jet, Jet, Jet]:
    """Semi-invariants ``P2, P3, P4`` of ``y'''' + 4p1 y''' + 6p2 y'' + 4p3 y' + p4 y = 0``.

    They are the coefficients after removing the third-order term by a
    multiplier, so the equation reads
    ``y'''' + 6 P2 y'' + 4 P3 y' + P4 y = 0``.
    """
    d1 = p1.deriv()
    d2 = d1.deriv()
    d3 = d2.deriv()
    P2 = p2 - p1 * p1 - d1
    P3 = p3 - 3.0 * p1 * p2 + 2.0 * p1 * p1 * p1 - d2
    P4 = (
        p4
        - 4.0 * p1 * p3
        + 6.0 * p1 * p1 * p2
        - 6.0 * d1 * p2
        - 3.0 * p1 ** 4
        + 6.0 * p1 * p1 * d1
        + 3.0 * d1 * d1
        - d3
    )
    return P2, P3, P4


def theta_from_halphen(P2: Jet, P3: Jet, P4: Jet) -> tuple[Jet, Jet]:
    """Projective invariants ``theta3 = P3 - (3/2) P2'`` and ``theta4``.

    ``theta4 = P4 - (9/5) P2'' - (81/25) P2^2 - 2 theta3'``.  Both are
    relative invariants of weights 3 and 4 under reparametrization.
    """
    th3 = P3 - 1.5 * P2.deriv()
    th4 = P4 - 1.8 * P2.deriv().deriv() - 3.24 * P2 * P2 - 2.0 * th3.deriv()
    return th3, th4


def _halphen_from_abc(a: Jet, b: Jet, c: Jet):
    # homogeneous lift (1, x): y'''' - a y''' - b y'' - c y' = 0
    zero = jet_constant(0.0, a.order)
    return halphen_coefficients(-a / 4.0, -b / 6.0, -c / 4.0, zero)


def space_invariants_at(
    spec: CurveSpec,
    t: float,
    *,
    strict: bool = True,
    order: int = DEFAULT_ORDER,
    tol_singular: float = TOL_SINGULAR,
    tol_complex: float = TOL_COMPLEX,
) -> SpaceInvariantRecord:
    """Every space invariant at parameter ``t``.

    ``theta3`` and ``theta4`` are computed from ``(k, M)`` and checked
    against the Halphen route built directly from ``a, b, c``; the
    ``"theta-mismatch"`` flag reports a disagreement above ``1e-6``
    relative.

    Raises
    ------
    AffineInflectionError
        When ``strict`` and ``|L| <= tol_singular (1 + |b| + a^2)``.

    Examples
    --------
    >>> from gacurves.curves import builtin
    >>> r = space_invariants_at(builtin("mk", lam=1.0), 0.2)
    >>> r.eps, round(r.k, 9), round(r.M, 9)
    (-1, -1.414213562, 1.414213562)
    """
    a, b, c, det = _frame(spec, t, order)
    av, bv, cv = a.value, b.value, c.value
    flags: list[str] = []
    try:
        Lj = _length_density(a, b)
    except InsufficientOrderError:
        return SpaceInvariantRecord(float(t), av, bv, cv, None, 0, None, None, None, None, None,
                                    None, None, False, ("sampled-order-limit",))
    L = Lj.value
    ds_dt = math.sqrt(abs(L))
    tol = singular_tolerance(av, bv, tol_singular)
    absdet = abs(det.value)
    ell_equi = absdet ** (-1.0 / 3.0) * L
    m_equi = None
    k = M = th3 = th4 = dk = dM = None
    eps = 0
    try:
        mr = _torsion_ratio(a, b, c)
        m_equi = absdet ** -0.5 * mr.value
    except InsufficientOrderError:
        mr = None
        flags.append("sampled-order-limit")
    if abs(L) <= tol:
        flags.append("inflection")
    else:
        eps = 1 if L > 0 else -1
        if mr is not None:
            try:
                sq = pow_real(Lj * float(eps), 0.5)
                kj = -(1.0 / 3.0) * (a - 3.0 * Lj.deriv() / Lj) / sq
                Mj = mr / (sq * sq * sq)
                k, M = kj.value, Mj.value
            except InsufficientOrderError:
                if "sampled-order-limit" not in flags:
                    flags.append("sampled-order-limit")
            try:
                if k is None:
                    raise InsufficientOrderError("k unavailable")
                dk = kj.deriv().value / ds_dt
                dM = Mj.deriv().value / ds_dt
                th3, th4 = theta_from_ga(k, M, dk, dM, eps)
                h3, h4 = theta_from_halphen(*_halphen_from_abc(a, b, c))
                r3 = h3.value / ds_dt ** 3
                r4 = h4.value / ds_dt ** 4
                scale = 1.0 + abs(th3) + abs(th4)
                if abs(r3 - th3) > 1e-6 * scale or abs(r4 - th4) > 1e-6 * scale:
                    flags.append("theta-mismatch")
            except InsufficientOrderError:
                if "sampled-order-limit" not in flags:
                    flags.append("sampled-order-limit")
    lc = th3 is not None and abs(th3) <= tol_complex
    rec = SpaceInvariantRecord(float(t), av, bv, cv, L, eps, ds_dt, k, M, ell_equi, m_equi,
                               th3, th4, lc, tuple(flags), dk, dM)
    if strict and eps == 0:
        err = AffineInflectionError(f"affine inflection at t = {t!r} (|L| = {abs(L):.3e} <= {tol:.3e})")
        err.record = rec  # type: ignore[attr-defined]
        raise err
    return rec


def space_curvature_routes(spec: CurveSpec, t: float, order: int = DEFAULT_ORDER) -> tuple[float, float]:
    """First curvature along two routes.

    Route one is ``-(1/3) A`` after reparametrizing to unit general-affine
    speed.  Route two is ``d log|ell| / ds`` for the equiaffine curvature
    ``ell = |det(x', x'', x''')|^(-1/3) L`` of the unimodular frame.
    """
    a, b, _, det = _frame(spec, t, order)
    Lj = _length_density(a, b)
    eps = 1.0 if Lj.value > 0 else -1.0
    sq = pow_real(Lj * eps, 0.5)
    k1 = (-(1.0 / 3.0) * (a - 3.0 * Lj.deriv() / Lj) / sq).value
    sdet = 1.0 if det.value > 0 else -1.0
    ell = pow_real(det * sdet, -1.0 / 3.0) * Lj * eps
    k2 = (ell.deriv() / ell).value / sq.value
    return float(k1), float(k2)


def equiaffine_space_invariants(
    spec: CurveSpec,
    t: float,
    *,
    reparametrize: bool = False,
    tol: float = 1e-8,
) -> tuple[float, float]:
    """Equiaffine curvature ``ell`` and torsion ``m`` at ``t``.

    Parameters
    ----------
    spec : CurveSpec
        A space curve.
    t : float
        Parameter value.
    reparametrize : bool
        If false, ``t`` must already be an equiaffine parameter, checked
        through ``|a(t)| <= tol``; then ``ell = -b`` and ``m = -c``.  If
        true, any parameter is accepted and the values refer to the
        equiaffine arc length ``d sigma = |det(x', x'', x''')|^(1/6) dt``;
        they are read off the unimodular frame, which is equivalent to
        reparametrizing and avoids a numeric quadrature.

    Raises
    ------
    NotEquiaffineError
        If ``reparametrize`` is false and ``|a| > tol``.

    Examples
    --------
    >>> from gacurves.curves import builtin
    >>> equiaffine_space_invariants(builtin("hyperbolic-helix"), 0.3)
    (-1.0, 0.0)
    """
    a, b, c, det = _frame(spec, t, DEFAULT_ORDER)
    if not reparametrize:
        if abs(a.value) > tol:
            raise NotEquiaffineError(
                f"t is not an equiaffine parameter (a = {a.value!r}); pass reparametrize=True"
            )
        return _clean(-b.value), _clean(-c.value)
    absdet = abs(det.value)
    L = _length_density(a, b).value
    mr = _torsion_ratio(a, b, c).value
    return absdet ** (-1.0 / 3.0) * L, absdet ** -0.5 * mr


def _clean(v: float) -> float:
    return 0.0 if v == 0 else float(v)


def equiaffine_arclength(spec: CurveSpec, t0: float, t1: float, rtol: float = 1e-10) -> float:
    """Equiaffine arc length ``int |det(x', x'', x''')|^(1/6) dt`` by adaptive quadrature."""

    def density(t):
        xs = eval_curve(spec, t, 3)
        cols = np.array([[x.derivative(j) for x in xs] for j in (1, 2, 3)])
        return abs(np.linalg.det(cols)) ** (1.0 / 6.0)

    val, _ = integrate.quad(density, t0, t1, epsrel=rtol, epsabs=0.0, limit=200)
    return float(val)


def projective_space_invariants(
    t: float,
    *,
    p_coeffs: "Sequence[Profile | str] | None" = None,
    from_ga: "tuple[Profile | str, Profile | str, int] | None" = None,
    variable: str = "t",
) -> tuple[float, float]:
    """Projective invariants ``theta3, theta4`` from either input route.

    Parameters
    ----------
    t : float
        Point of evaluation.
    p_coeffs : sequence of three profiles, optional
        ``(P2, P3, P4)`` of the normalized equation
        ``y'''' + 6 P2 y'' + 4 P3 y' + P4 y = 0``.
    from_ga : tuple, optional
        ``(k, M, eps)`` with ``k`` and ``M`` functions of general-affine
        arc length.

    Exactly one of ``p_coeffs`` and ``from_ga`` must be given.

    Examples
    --------
    >>> projective_space_invariants(0.0, from_ga=(0.0, 0.0, 1))
    (0.0, -0.09)
    """
    if (p_coeffs is None) == (from_ga is None):
        raise UsageError("give exactly one of p_coeffs and from_ga")
    if from_ga is not None:
        k, M, eps = from_ga
        kj = profile_jet(as_profile(k), t, 2, variable)
        Mj = profile_jet(as_profile(M), t, 2, variable)
        th3, th4 = theta_from_ga(kj.value, Mj.value, kj.derivative(1), Mj.derivative(1), int(eps))
        return float(th3), float(th4)
    P2, P3, P4 = (profile_jet(as_profile(p), t, 4, variable) for p in p_coeffs)  # type: ignore[union-attr]
    th3, th4 = theta_from_halphen(P2, P3, P4)
    return float(th3.value), float(th4.value)


def ga_ode_coefficients(k: Jet, M: Jet, eps: int) -> tuple[Jet, Jet, Jet]:
    """Coefficients ``(a, b, c)`` of the space ODE in general-affine arc length.

    ``x'''' = -3k x''' - (2k' + 11k^2/4 + eps) x'' - (M + eps k/2 + k''/2 + 7kk'/4 + 3k^3/4) x'``.
    """
    k1 = k.deriv()
    k2 = k1.deriv()
    n = min(k2.order, M.order)
    k, k1, k2, M = (j.truncate(n) for j in (k, k1, k2, M))
    a = -3.0 * k
    b = -(2.0 * k1 + 2.75 * k * k + float(eps))
    c = -(M + 0.5 * eps * k + 0.5 * k2 + 1.75 * k * k1 + 0.75 * k * k * k)
    return a, b, c


def theta_from_ga_halphen(k: Profile, M: Profile, eps: int, s: float, variable: str = "t") -> tuple[float, float]:
    """``theta3, theta4`` by building the Halphen form from the general-affine ODE."""
    kj = profile_jet(as_profile(k), s, 7, variable)
    Mj = profile_jet(as_profile(M), s, 5, variable)
    a, b, c = ga_ode_coefficients(kj, Mj, eps)
    h3, h4 = theta_from_halphen(*_halphen_from_abc(a, b, c))
    return float(h3.value), float(h4.value)


# ----------------------------------------------------------------------
# scans
@dataclass
class SpaceScan:
    """Records on a grid, inflection events and the linear-complex verdict."""

    records: list[SpaceInvariantRecord]
    inflections: list[float]
    theta3_sup: float | None
    linear_complex: bool
    tolerances: dict = field(default_factory=dict)


def _safe(spec, t, tol_singular, tol_complex):
    try:
        return space_invariants_at(spec, t, strict=False, tol_singular=tol_singular, tol_complex=tol_complex)
    except (DegenerateCurveError, CurveEvaluationError, JetError) as exc:
        flag = "degenerate" if isinstance(exc, DegenerateCurveError) else "undefined"
        return SpaceInvariantRecord(float(t), None, None, None, None, 0, None, None, None, None, None,
                                    None, None, False, (flag,))


def scan_space(
    spec: CurveSpec,
    grid: "Sequence[float] | int" = 401,
    *,
    tol_singular: float = TOL_SINGULAR,
    tol_complex: float = TOL_COMPLEX,
) -> SpaceScan:
    """Space invariant records on a grid.

    Affine inflections (sign changes of ``L``) are located by Brent's
    method.  The curve is declared to lie in a linear complex when
    ``sup |theta3| <= tol_complex`` over every valid grid point.
    """
    if isinstance(grid, (int, np.integer)):
        grid = np.linspace(spec.interval[0], spec.interval[1], int(grid))
    ts = np.asarray(grid, dtype=float)
    if ts.size < 2 or np.any(np.diff(ts) <= 0):
        raise UsageError("scan grid must be increasing with at least two points")
    records = [_safe(spec, t, tol_singular, tol_complex) for t in ts]
    Lv = np.array([r.L if r.L is not None else np.nan for r in records])

    def L_fn(t):
        return space_invariants_at(spec, t, strict=False, tol_singular=tol_singular).L

    inflections = []
    for i in range(ts.size - 1):
        if Lv[i] * Lv[i + 1] < 0:
            try:
                tz = optimize.brentq(L_fn, ts[i], ts[i + 1], xtol=1e-13)
            except (ValueError, GACurveError):
                tz = 0.5 * (ts[i] + ts[i + 1])
            inflections.append(float(tz))
    th = [abs(r.theta3) for r in records if r.theta3 is not None]
    sup = max(th) if th else None
    return SpaceScan(
        records=records,
        inflections=inflections,
        theta3_sup=sup,
        linear_complex=bool(sup is not None and sup <= tol_complex),
        tolerances={"tol_singular": tol_singular, "tol_degenerate": TOL_DEGENERATE, "tol_complex": tol_complex},
    )
