"""General-affine, equiaffine and projective invariants of plane curves.

For a nondegenerate plane curve ``x(t)`` the third derivative is a
combination ``x''' = a x'' + b x'``.  Solving that 2x2 system in the jet
ring gives ``a`` and ``b`` together with their derivatives, and every
invariant below is a differential polynomial in them:

* length density ``L = -(b + 2a^2/9 - a'/3)``, sign ``eps = sign(L)`` and
  general-affine length element ``ds = sqrt(|L|) dt``;
* general-affine curvature ``k = -(2/3) (a - (3/2) L'/L) / sqrt(|L|)``;
* equiaffine curvature ``k_a = |det(x', x'')|^(-2/3) L``;
* projective invariant ``P = P3 - P2'/2`` of the Laguerre-Forsyth form,
  reported per unit general-affine length, and the projective curvature
  ``k_p = P^(-2/3) (P2/2 - P''/(3P) + (7/18) (P'/P)^2)``.

No integration of ``a`` is ever performed: every reported quantity is
free of the multiplicative constant of the normalizing factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from .curves import CurveSpec, eval_curve, from_expressions
from .errors import (
    AffineInflectionError,
    CurveEvaluationError,
    DegenerateCurveError,
    GACurveError,
    InsufficientOrderError,
    JetError,
    NonconvexGraphError,
    SampledOrderError,
    UsageError,
    ZeroCurvatureError,
)
from .expr import Expr, as_expr
from .jet import DEFAULT_ORDER, Jet, det2, jet_variable, pow_real, solve_linear

__all__ = [
    "TOL_SINGULAR",
    "TOL_DEGENERATE",
    "PlaneInvariantRecord",
    "PlaneEvent",
    "PlaneScan",
    "GraphInvariants",
    "plane_ode_coeffs",
    "plane_invariants_at",
    "plane_curvature_routes",
    "plane_graph_invariants",
    "equiaffine_to_ga",
    "scan_curve",
    "singular_tolerance",
    "fd_derivative",
]

#: factor of the scaled tolerance ``1e-9 (1 + |b| + a^2)`` for affine inflections
TOL_SINGULAR = 1e-9
#: factor of the scaled tolerance ``1e-12 |x'| |x''|`` for the frame determinant
TOL_DEGENERATE = 1e-12


def singular_tolerance(a: float, b: float, factor: float = TOL_SINGULAR) -> float:
    """Scaled threshold below which ``|L|`` counts as zero."""
    return factor * (1.0 + abs(b) + a * a)


@dataclass(frozen=True)
class PlaneInvariantRecord:
    """Invariants of a plane curve at one parameter value.

    Undefined quantities are ``None`` and explained by ``flags``:
    ``"inflection"`` (``|L|`` below tolerance), ``"sextactic"`` (``P``
    below tolerance, so ``k_p`` is undefined), ``"sampled-order-limit"``
    (derivatives missing for sampled input) and ``"degenerate"``.
    ``eps`` is 0 when undefined.  ``dk_ds`` is the derivative of ``k``
    with respect to general-affine arc length.
    """

    t: float
    a: float | None
    b: float | None
    L: float | None
    eps: int
    ds_dt: float | None
    k: float | None
    k_a: float | None
    P: float | None
    k_p: float | None
    flags: tuple[str, ...] = ()
    dk_ds: float | None = None

    CSV_FIELDS = ("t", "a", "b", "L", "eps", "ds_dt", "k", "k_a", "P", "k_p", "flags")

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "a": self.a,
            "b": self.b,
            "L": self.L,
            "eps": self.eps,
            "ds_dt": self.ds_dt,
            "k": self.k,
            "k_a": self.k_a,
            "P": self.P,
            "k_p": self.k_p,
            "flags": list(self.flags),
        }


def _frame_jets(spec: CurveSpec, t: float, order: int):
    xs = eval_curve(spec, t, order)
    d1 = [x.deriv() for x in xs]
    d2 = [x.deriv() for x in d1]
    d3 = [x.deriv() for x in d2]
    return xs, d1, d2, d3


def _check_degenerate(d1, d2, det: Jet, factor: float = TOL_DEGENERATE) -> None:
    n1 = math.hypot(*(d.value for d in d1))
    n2 = math.hypot(*(d.value for d in d2))
    if not abs(det.value) > factor * n1 * n2:
        raise DegenerateCurveError(
            f"x' and x'' are linearly dependent (|det| = {abs(det.value):.3e}, |x'| = {n1:.3e}, |x''| = {n2:.3e})"
        )


def _available_order(spec: CurveSpec, order: int) -> int:
    cap = spec.max_order
    return order if cap is None else min(order, cap)


def plane_ode_coeffs(spec: CurveSpec, t: float, order: int = DEFAULT_ORDER) -> tuple[Jet, Jet]:
    """Coefficients of ``x''' = a x'' + b x'`` as jets at ``t``.

    Parameters
    ----------
    spec : CurveSpec
        A plane curve.
    t : float
        Parameter value.
    order : int
        Jet order used for the coordinates; ``a`` and ``b`` come out with
        order ``order - 3``.

    Raises
    ------
    DegenerateCurveError
        When ``|det(x', x'')| <= 1e-12 |x'| |x''|``.
    """
    if spec.dimension != 2:
        raise UsageError("plane_ode_coeffs needs a plane curve")
    order = _available_order(spec, order)
    if order < 3:
        raise InsufficientOrderError("the plane ODE needs third derivatives")
    _, d1, d2, d3 = _frame_jets(spec, t, order)
    det = det2(d2, d1)
    _check_degenerate(d1, d2, det)
    (a, b), _ = solve_linear([d2, d1], d3)
    return a, b


def _projective(a: Jet, b: Jet, ds_dt: float, tol: float):
    """Projective invariant per unit GA length and projective curvature."""
    p1 = -a / 3.0
    p2 = -b / 3.0
    P2 = 3.0 * (p2 - p1 * p1 - p1.deriv())
    P3 = -3.0 * p1 * p2 + 2.0 * p1 * p1 * p1 - p1.deriv().deriv()
    Pj = P3 - 0.5 * P2.deriv()
    P_t = Pj.value
    P = P_t / ds_dt**3 if ds_dt else None
    if abs(P_t) <= tol:
        return P, None, True
    dP = Pj.deriv()
    ddP = dP.deriv()
    kp = np.cbrt(P_t) ** -2 * (
        0.5 * P2.value - ddP.value / (3.0 * P_t) + (7.0 / 18.0) * (dP.value / P_t) ** 2
    )
    return P, float(kp), False


def plane_invariants_at(
    spec: CurveSpec,
    t: float,
    *,
    strict: bool = True,
    order: int = DEFAULT_ORDER,
    tol_singular: float = TOL_SINGULAR,
) -> PlaneInvariantRecord:
    """Every plane invariant at parameter ``t``.

    Parameters
    ----------
    spec : CurveSpec
        A plane curve.
    t : float
        Parameter value.
    strict : bool
        When true (the default) an affine inflection raises
        :class:`AffineInflectionError`, with the flagged record attached
        as ``exc.record``.  When false the flagged record is returned.
    order : int
        Jet order (sampled curves are capped at four).
    tol_singular : float
        Factor of the scaled inflection tolerance.

    Returns
    -------
    PlaneInvariantRecord

    Examples
    --------
    >>> from gacurves.curves import builtin
    >>> rec = plane_invariants_at(builtin("log-spiral"), 0.3)
    >>> rec.eps, round(rec.k, 6)
    (1, -1.264911)
    """
    if spec.dimension != 2:
        raise UsageError("plane_invariants_at needs a plane curve")
    order = _available_order(spec, order)
    _, d1, d2, d3 = _frame_jets(spec, t, order)
    det = det2(d2, d1)
    _check_degenerate(d1, d2, det)
    (a, b), _ = solve_linear([d2, d1], d3)
    flags: list[str] = []
    av, bv = a.value, b.value
    try:
        Lj = -(b + (2.0 / 9.0) * a * a - a.deriv() / 3.0)
    except InsufficientOrderError:
        return PlaneInvariantRecord(float(t), av, bv, None, 0, None, None, None, None, None,
                                    ("sampled-order-limit",))
    L = Lj.value
    tol = singular_tolerance(av, bv, tol_singular)
    ds_dt = math.sqrt(abs(L))
    # equiaffine curvature: unimodular normalization |det(e1, e2)| = 1
    k_a = abs(det.value) ** (-2.0 / 3.0) * L
    if abs(L) <= tol:
        flags.append("inflection")
        eps = 0
        k = None
        dk_ds = None
    else:
        eps = 1 if L > 0 else -1
        try:
            absL = Lj * float(eps)
            kj = -(2.0 / 3.0) * (a - 1.5 * Lj.deriv() / Lj) / pow_real(absL, 0.5)
            k = kj.value
            dk_ds = kj.deriv().value / ds_dt
        except InsufficientOrderError:
            k = dk_ds = None
            flags.append("sampled-order-limit")
    try:
        P, k_p, sextactic = _projective(a, b, ds_dt, tol)
        if sextactic:
            flags.append("sextactic")
        if eps == 0:
            k_p = None
    except InsufficientOrderError:
        P = k_p = None
        if "sampled-order-limit" not in flags:
            flags.append("sampled-order-limit")
    rec = PlaneInvariantRecord(float(t), av, bv, L, eps, ds_dt, k, k_a, P, k_p, tuple(flags), dk_ds)
    if strict and eps == 0:
        err = AffineInflectionError(f"affine inflection at t = {t!r} (|L| = {abs(L):.3e} <= {tol:.3e})")
        err.record = rec  # type: ignore[attr-defined]
        raise err
    return rec


def plane_curvature_routes(spec: CurveSpec, t: float, order: int = DEFAULT_ORDER) -> tuple[float, float]:
    """General-affine curvature computed along two independent routes.

    The first route reparametrizes the ODE to unit general-affine speed
    and reads ``k = -(2/3) A``.  The second differentiates the logarithm
    of the equiaffine curvature ``|det(x', x'')|^(-2/3) L`` with respect
    to general-affine arc length.
    """
    _, d1, d2, d3 = _frame_jets(spec, t, order)
    det = det2(d2, d1)
    _check_degenerate(d1, d2, det)
    (a, b), _ = solve_linear([d2, d1], d3)
    Lj = -(b + (2.0 / 9.0) * a * a - a.deriv() / 3.0)
    eps = 1.0 if Lj.value > 0 else -1.0
    sq = pow_real(Lj * eps, 0.5)
    k1 = (-(2.0 / 3.0) * (a - 1.5 * Lj.deriv() / Lj) / sq).value
    sdet = 1.0 if det.value > 0 else -1.0
    ka = pow_real(det * sdet, -2.0 / 3.0) * Lj * eps  # |k_a|
    k2 = (ka.deriv() / ka).value / sq.value
    return float(k1), float(k2)


# ----------------------------------------------------------------------
# graph immersions
@dataclass(frozen=True)
class GraphInvariants:
    """Invariants of a graph ``(t, f(t))`` from the fifth-order formulas.

    ``mu_derivs`` holds ``mu, mu', mu'', mu'''`` for ``mu = (f'')^(-2/3)``;
    ``k_squared_ode`` is the square of the curvature from the ODE route.
    """

    ds_dt: float
    k_squared: float
    mu: float
    mu_derivs: tuple[float, float, float, float]
    k_squared_ode: float | None
    inflection: bool

    def __iter__(self):
        yield from (self.ds_dt, self.k_squared, self.mu)


def plane_graph_invariants(f: "Expr | str", t: float, params: dict | None = None) -> GraphInvariants:
    """Length element, squared curvature and ``mu`` of the graph of ``f``.

    Uses the closed formulas in ``f'' .. f^(5)``; the ODE route on the
    curve ``(t, f(t))`` is evaluated alongside as a cross-check.

    Raises
    ------
    NonconvexGraphError
        When ``f''(t) <= 0``.
    """
    f = as_expr(f)
    env = dict(params or {})
    env["t"] = jet_variable(float(t), DEFAULT_ORDER)
    fj = f.evaluate(env)
    d = fj.derivatives()
    f2, f3, f4, f5 = d[2], d[3], d[4], d[5]
    if not f2 > 0:
        raise NonconvexGraphError(f"f''({t}) = {f2!r} is not positive")
    mu_j = pow_real(fj.deriv().deriv(), -2.0 / 3.0)
    md = mu_j.derivatives()
    den = 3.0 * f2 * f4 - 5.0 * f3 * f3
    num = 9.0 * f2 * f2 * f5 - 45.0 * f2 * f3 * f4 + 40.0 * f3**3
    ds_dt = math.sqrt(abs(den) / (9.0 * f2 * f2))
    inflection = abs(den) <= 1e-9 * (abs(3.0 * f2 * f4) + 5.0 * f3 * f3 + f2 * f2 * 1e-3)
    k_sq = math.inf if inflection else num * num / abs(den) ** 3
    k_ode = None
    if not inflection:
        spec = from_expressions(["t", f], (float(t) - 1.0, float(t) + 1.0), params=params)
        try:
            rec = plane_invariants_at(spec, t)
            k_ode = rec.k * rec.k
        except GACurveError:
            k_ode = None
    return GraphInvariants(ds_dt, k_sq, float(md[0]), tuple(float(v) for v in md[:4]), k_ode, inflection)


# ----------------------------------------------------------------------
# equiaffine to general affine
def fd_derivative(x: Sequence[float], y: Sequence[float], points: int = 5) -> np.ndarray:
    """First derivative of sampled ``y(x)`` with local polynomial stencils.

    Five-point stencils give accuracy order four on any grid, centered in
    the interior and one-sided near the ends.
    """
    from .curves import fd_weights

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < points:
        raise UsageError(f"at least {points} samples needed")
    out = np.empty(n)
    half = points // 2
    for i in range(n):
        lo = min(max(i - half, 0), n - points)
        idx = np.arange(lo, lo + points)
        out[i] = fd_weights(x[idx] - x[i], 1) @ y[idx]
    return out


def equiaffine_to_ga(sigma: Sequence[float], k_a: Sequence[float]) -> np.ndarray:
    """General-affine curvature from equiaffine curvature samples.

    Parameters
    ----------
    sigma : array_like
        Increasing grid of equiaffine arc length.
    k_a : array_like
        Equiaffine curvature on the grid.

    Returns
    -------
    ndarray
        ``k = K' K^(-3/2)`` with ``K = |k_a|``.

    Raises
    ------
    ZeroCurvatureError
        If ``k_a`` vanishes somewhere on the window.
    """
    K = np.abs(np.asarray(k_a, dtype=float))
    if np.any(K <= 1e-300) or np.any(K <= 1e-12 * np.max(K)):
        raise ZeroCurvatureError("equiaffine curvature vanishes on the window")
    return fd_derivative(sigma, K) * K**-1.5


# ----------------------------------------------------------------------
# scans and events
@dataclass(frozen=True)
class PlaneEvent:
    """A located event along a scan.

    ``kind`` is ``"inflection"`` (sign change of L), ``"flat"`` (zero of
    k, a sextactic point) or ``"vertex"`` (extremum of k).
    """

    kind: str
    t: float
    bracket: tuple[float, float]
    value: float | None = None


@dataclass
class PlaneScan:
    records: list[PlaneInvariantRecord]
    events: list[PlaneEvent]
    total_curvature: float
    segment_curvatures: list[tuple[float, float, float]]
    total_curvature_valid: bool
    closed: bool
    tolerances: dict = field(default_factory=dict)

    def events_of(self, kind: str) -> list[PlaneEvent]:
        return [e for e in self.events if e.kind == kind]


def _is_closed(spec: CurveSpec) -> bool:
    lo, hi = spec.interval
    try:
        a = eval_curve(spec, lo, _available_order(spec, 3))
        b = eval_curve(spec, hi, _available_order(spec, 3))
    except GACurveError:
        return False
    ca = np.concatenate([j.coeffs for j in a])
    cb = np.concatenate([j.coeffs for j in b])
    return bool(np.max(np.abs(ca - cb)) <= 1e-9 * max(1.0, np.max(np.abs(ca))))


def _safe_record(spec, t, tol_singular) -> PlaneInvariantRecord:
    try:
        return plane_invariants_at(spec, t, strict=False, tol_singular=tol_singular)
    except (DegenerateCurveError, CurveEvaluationError, JetError) as exc:
        return PlaneInvariantRecord(float(t), None, None, None, 0, None, None, None, None, None,
                                    ("degenerate",) if isinstance(exc, DegenerateCurveError) else ("undefined",))


def _scalar(spec, attr, tol_singular):
    def f(t):
        r = plane_invariants_at(spec, t, strict=False, tol_singular=tol_singular)
        v = getattr(r, attr)
        if v is None:
            raise GACurveError(f"{attr} undefined at {t}")
        return v

    return f


def _refine(fn, lo, hi):
    try:
        return optimize.brentq(fn, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (ValueError, GACurveError, RuntimeError):
        return 0.5 * (lo + hi)


def scan_curve(
    spec: CurveSpec,
    grid: "Sequence[float] | int" = 401,
    *,
    tol_singular: float = TOL_SINGULAR,
    zero_tol: float = 1e-10,
) -> PlaneScan:
    """Invariant records on a grid plus located events and total curvature.

    Parameters
    ----------
    spec : CurveSpec
        A plane curve.
    grid : array_like or int
        Parameter values inside the interval, or a number of equispaced
        points spanning the whole interval.
    tol_singular : float
        Factor of the inflection tolerance.
    zero_tol : float
        Grid values of ``k`` with ``|k|`` below this count as zeros.

    Returns
    -------
    PlaneScan
        Records, events sorted by parameter, the total curvature
        ``int k ds`` (composite Simpson per valid segment) and whether the
        curve is closed.  On closed curves the endpoint duplicates of
        events are dropped and sign changes across the seam are checked.
    """
    if isinstance(grid, (int, np.integer)):
        grid = np.linspace(spec.interval[0], spec.interval[1], int(grid))
    ts = np.asarray(grid, dtype=float)
    if ts.size < 2 or np.any(np.diff(ts) <= 0):
        raise UsageError("scan grid must be increasing with at least two points")
    records = [_safe_record(spec, t, tol_singular) for t in ts]
    closed = _is_closed(spec) and np.isclose(ts[0], spec.interval[0]) and np.isclose(ts[-1], spec.interval[1])
    events: list[PlaneEvent] = []

    Lv = np.array([r.L if r.L is not None else np.nan for r in records])
    kv = np.array([r.k if r.k is not None else np.nan for r in records])
    dkv = np.array([r.dk_ds if r.dk_ds is not None else np.nan for r in records])
    n = ts.size
    last = n - 1 if closed else n  # on closed curves the last point duplicates the first

    L_fn = _scalar(spec, "L", tol_singular)
    k_fn = _scalar(spec, "k", tol_singular)
    dk_fn = _scalar(spec, "dk_ds", tol_singular)

    for i in range(n - 1):
        if Lv[i] * Lv[i + 1] < 0:
            tz = _refine(L_fn, ts[i], ts[i + 1])
            events.append(PlaneEvent("inflection", tz, (ts[i], ts[i + 1])))

    # zeros of k
    zero_idx = set()
    for i in range(last):
        if np.isfinite(kv[i]) and abs(kv[i]) <= zero_tol:
            zero_idx.add(i)
            events.append(PlaneEvent("flat", float(ts[i]), (ts[i], ts[i]), records[i].P))
    for i in range(n - 1):
        if i in zero_idx or (i + 1) in zero_idx or (closed and i + 1 == n - 1 and 0 in zero_idx):
            continue
        if Lv[i] * Lv[i + 1] < 0:
            continue  # k changes sign through a pole at an affine inflection
        if np.isfinite(kv[i]) and np.isfinite(kv[i + 1]) and kv[i] * kv[i + 1] < 0:
            tz = _refine(k_fn, ts[i], ts[i + 1])
            P = _safe_record(spec, tz, tol_singular).P
            events.append(PlaneEvent("flat", tz, (ts[i], ts[i + 1]), P))

    # extrema of k: sign changes of dk/ds
    pairs = [(i, i + 1) for i in range(n - 1)]
    if closed:
        pairs[-1] = (n - 2, 0)  # the seam: the last point equals the first
    seen = set()
    for i, j in pairs:
        if not (np.isfinite(dkv[i]) and np.isfinite(dkv[j])) or Lv[i] * Lv[j] < 0:
            continue
        if dkv[i] == 0.0 and i not in seen:
            seen.add(i)
            events.append(PlaneEvent("vertex", float(ts[i]), (ts[i], ts[i]), kv[i]))
            continue
        if dkv[i] * dkv[j] < 0:
            t_hi = ts[j] if j > i else ts[n - 1]
            tz = _refine(dk_fn, ts[i], t_hi)
            events.append(PlaneEvent("vertex", tz, (ts[i], t_hi), k_fn(tz)))

    events.sort(key=lambda e: (e.t, e.kind))

    # total curvature over runs of valid points
    integrand = np.array([r.k * r.ds_dt if r.k is not None else np.nan for r in records])
    segments = []
    i = 0
    while i < n:
        if not np.isfinite(integrand[i]):
            i += 1
            continue
        j = i
        while j + 1 < n and np.isfinite(integrand[j + 1]) and not (Lv[j] * Lv[j + 1] < 0):
            j += 1
        if j > i:
            val = float(integrate.simpson(integrand[i : j + 1], x=ts[i : j + 1]))
            segments.append((float(ts[i]), float(ts[j]), val))
        i = j + 1
    valid = len(segments) == 1 and segments[0][0] == ts[0] and segments[0][1] == ts[-1]
    total = float(sum(s[2] for s in segments))
    return PlaneScan(
        records=records,
        events=events,
        total_curvature=total,
        segment_curvatures=segments,
        total_curvature_valid=valid,
        closed=bool(closed),
        tolerances={"tol_singular": tol_singular, "tol_degenerate": TOL_DEGENERATE, "zero_tol": zero_tol},
    )
