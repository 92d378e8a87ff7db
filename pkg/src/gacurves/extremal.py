"""Residuals of the extremality equations for curvature data.

Every function evaluates a left-hand side pointwise on a grid from exact
jets of the curvature profiles, and returns a :class:`ResidualReport`
with the sup and L2 norms and the verdict ``sup <= tau``.  The default
tolerance is ``tau = 1e-7 (1 + sup|k|)^3``, cubic because the residuals
are cubic in ``k``.  Grid points where a profile exceeds ``1e6`` in
magnitude or cannot be evaluated are excluded.

Equations (derivatives with respect to arc length of the geometry):

``ga-plane``
    ``k''' + (3/2) k k'' + (1/2) k'^2 + (1/2) k^2 k' + eps k'``.
``ga-plane-general``
    ``G'' + (3/2) G' k + (1/2) G k' + (1/2) G k^2 + eps G`` for the
    functional ``int f(k) ds`` with
    ``G = 4 f''''(k) k'^3 + 12 f'''(k) k' k'' + f''(k) (4k''' - k' k^2 + 16 eps k') - f'(k) k k' + f(k) k'``.
    For ``f = 1`` this is the ``ga-plane`` residual.
``ga-space-1``, ``ga-space-2``
    ``k''' + (3/2) k k'' + (1/2) k'^2 + (1/2) k^2 k' - (1/5) eps k' + (6/5) M'`` and
    ``k'' + (2/3) k k' + (5/6) eps k' M - (3/2) eps k M' - eps M''``.
``proj-plane``
    ``k''' + 8 k k'``.
``proj-space-1``, ``proj-space-2``
    ``k1''' + 16 k1 k1' - k2'/2`` and
    ``k1'''' + 16 k1 k1'' + 16 k1'^2 + 6 k1' - k2''/2``.

The general-affine plane equation is the one obtained from the moving
frame computation; a classical 1936 version of it differs by some terms,
and the form above is the corrected one.

Residuals are local: evaluating on a sub-grid gives exactly the
restriction of the full evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .curves import CurveSpec
from .errors import GACurveError, InsufficientOrderError, JetError, UsageError
from .expr import Expr, as_expr
from .jet import Jet, jet_variable
from .profiles import Profile, as_profile, profile_jet
from .reconstruct import POLE_THRESHOLD, ReconstructionResult
from .space import equiaffine_space_invariants, space_ode_coeffs

__all__ = [
    "EQUATIONS",
    "ResidualReport",
    "LinearComplexReport",
    "EquiaffineExtremalReport",
    "default_tolerance",
    "make_grid",
    "ga_plane_residual",
    "assemble_G",
    "ga_plane_general_residual",
    "ga_space_residuals",
    "linear_complex_extremal_check",
    "equiaffine_space_extremal_check",
    "projective_extremal_residuals",
    "linear_dependence_residual",
]

EQUATIONS = (
    "GA_PLANE",
    "GA_PLANE_GENERAL",
    "GA_SPACE_1",
    "GA_SPACE_2",
    "EQUIAFFINE_SPACE",
    "PROJ_PLANE",
    "PROJ_SPACE_1",
    "PROJ_SPACE_2",
)


def default_tolerance(k_sup: float) -> float:
    """``1e-7 (1 + sup|k|)^3``."""
    return 1e-7 * (1.0 + k_sup) ** 3


@dataclass
class ResidualReport:
    """Pointwise residuals of one equation with norms and verdict."""

    equation: str
    grid: np.ndarray
    residuals: np.ndarray
    tolerance: float
    excluded: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0

    @property
    def l2_norm(self) -> float:
        if self.residuals.size < 2:
            return self.sup_norm
        return float(np.sqrt(integrate.trapezoid(self.residuals ** 2, self.grid)))

    @property
    def verdict(self) -> bool:
        return self.sup_norm <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "equation": self.equation,
            "sup_norm": self.sup_norm,
            "l2_norm": self.l2_norm,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "points": int(self.grid.size),
            "excluded": int(self.excluded),
        }


def make_grid(grid: "Sequence[float] | tuple[float, float, int]") -> np.ndarray:
    """Accept an explicit grid or a triple ``(t_min, t_max, n)``."""
    if isinstance(grid, tuple) and len(grid) == 3 and isinstance(grid[2], (int, np.integer)):
        lo, hi, n = grid
        if not lo < hi or n < 2:
            raise UsageError("grid needs t_min < t_max and n >= 2")
        return np.linspace(float(lo), float(hi), int(n))
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 1:
        raise UsageError("grid must be a 1D array of parameter values")
    return g


def _evaluate(
    name: str,
    profiles: Sequence[Profile],
    orders: Sequence[int],
    grid,
    fn: Callable[..., Sequence[float]],
    variable: str,
    k_index: int = 0,
) -> tuple[np.ndarray, list[np.ndarray], int, float]:
    """Evaluate ``fn(*jets)`` on the grid, skipping poles and failures."""
    ts = make_grid(grid)
    keep, outs = [], []
    ksup = 0.0
    excluded = 0
    for t in ts:
        try:
            jets = [profile_jet(p, t, o, variable) for p, o in zip(profiles, orders)]
        except (JetError, GACurveError, ZeroDivisionError, OverflowError):
            excluded += 1
            continue
        if any(not np.all(np.isfinite(j.coeffs)) or abs(j.value) > POLE_THRESHOLD for j in jets):
            excluded += 1
            continue
        for j, o in zip(jets, orders):
            if j.order < o:
                raise InsufficientOrderError(
                    f"{name} needs derivatives of order {o}; the profile provides {j.order}"
                )
        keep.append(t)
        outs.append(fn(*jets))
        ksup = max(ksup, abs(jets[k_index].value))
    arr = np.array(outs, dtype=float).reshape(len(keep), -1)
    return np.array(keep), [arr[:, i] for i in range(arr.shape[1])], excluded, ksup


def _d(j: Jet) -> list[float]:
    return list(j.derivatives())


def _plane_lhs(k: Sequence[float], eps: float) -> float:
    k0, k1, k2, k3 = k[:4]
    return k3 + 1.5 * k0 * k2 + 0.5 * k1 * k1 + 0.5 * k0 * k0 * k1 + eps * k1


def ga_plane_residual(k, eps: int, grid=(0.0, 1.0, 101), *, tau: float | None = None,
                      variable: str = "t") -> ResidualReport:
    """Residual of the general-affine extremal equation for plane curves.

    Examples
    --------
    >>> r = ga_plane_residual("3*sqrt(2)*tanh(sqrt(2)*t)", 1, (-2.0, 2.0, 201))
    >>> r.verdict, r.sup_norm < 1e-9
    (True, True)
    """
    kp = as_profile(k)
    e = float(eps)
    ts, (res,), exc, ksup = _evaluate(
        "ga-plane", [kp], [3], grid, lambda kj: [_plane_lhs(_d(kj), e)], variable
    )
    return ResidualReport("GA_PLANE", ts, res, tau if tau is not None else default_tolerance(ksup), exc)


def _f_jets(f: Expr, kj: Jet, nder: int, var: str = "k") -> list[Jet]:
    """``f(k(t)), f'(k(t)), ..., f^(nder)(k(t))`` as jets in ``t``."""
    n = kj.order
    v = f.evaluate({var: jet_variable(kj.value, n + nder)})
    if not isinstance(v, Jet):
        v = Jet(np.r_[float(v), np.zeros(n + nder)])
    out = []
    cur = v
    for j in range(nder + 1):
        out.append(cur.truncate(n).compose(kj))
        if j < nder:
            cur = cur.deriv()
    return out


def assemble_G(k: Jet, eps: int, f: "Expr | str", var: str = "k") -> Jet:
    """The function ``G`` of the generalized functional as a jet in ``t``.

    ``k`` must have order at least 3; the result has order
    ``k.order - 3``.
    """
    f = as_expr(f)
    F0, F1, F2, F3, F4 = _f_jets(f, k, 4, var)
    k1 = k.deriv()
    k2 = k1.deriv()
    k3 = k2.deriv()
    e = float(eps)
    return (
        4.0 * F4 * k1 * k1 * k1
        + 12.0 * F3 * k1 * k2
        + F2 * (4.0 * k3 - k1 * k * k + 16.0 * e * k1)
        - F1 * k * k1
        + F0 * k1
    )


def ga_plane_general_residual(k, eps: int, f: "Expr | str", grid=(0.0, 1.0, 101), *,
                              tau: float | None = None, variable: str = "t",
                              f_variable: str = "k") -> ResidualReport:
    """Residual ``G'' + (3/2) G' k + (1/2) G k' + (1/2) G k^2 + eps G``.

    ``f`` is an expression in the variable ``k`` (``f_variable``); its
    derivatives come from jets in that variable composed with the jet of
    the profile.  The report's ``extra`` holds the pointwise ``G``.
    """
    kp = as_profile(k)
    fe = as_expr(f)
    e = float(eps)

    def fn(kj):
        G = assemble_G(kj, eps, fe, f_variable)
        g = _d(G)
        kd = _d(kj)
        return [g[2] + 1.5 * g[1] * kd[0] + 0.5 * g[0] * kd[1] + 0.5 * g[0] * kd[0] ** 2 + e * g[0], g[0]]

    ts, (res, G), exc, ksup = _evaluate("ga-plane-general", [kp], [5], grid, fn, variable)
    rep = ResidualReport("GA_PLANE_GENERAL", ts, res, tau if tau is not None else default_tolerance(ksup), exc)
    rep.extra["G"] = G
    rep.extra["f"] = str(fe)
    return rep


def _space_lhs(k: Sequence[float], M: Sequence[float], eps: float) -> tuple[float, float]:
    k0, k1, k2, k3 = k[:4]
    M0, M1, M2 = M[:3]
    r1 = k3 + 1.5 * k0 * k2 + 0.5 * k1 * k1 + 0.5 * k0 * k0 * k1 - 0.2 * eps * k1 + 1.2 * M1
    r2 = k2 + (2.0 / 3.0) * k0 * k1 + (5.0 / 6.0) * eps * k1 * M0 - 1.5 * eps * k0 * M1 - eps * M2
    return r1, r2


def ga_space_residuals(k, M, eps: int, grid=(0.0, 1.0, 101), *, tau: float | None = None,
                       variable: str = "t") -> tuple[ResidualReport, ResidualReport]:
    """The pair of general-affine extremal equations for space curves.

    Examples
    --------
    >>> a = (2 / 5) ** 0.5
    >>> r1, r2 = ga_space_residuals(f"3*{a!r}*tanh({a!r}*t)", 0, -1, (-3.0, 3.0, 61))
    >>> r1.verdict and r2.verdict
    True
    """
    kp, Mp = as_profile(k), as_profile(M)
    e = float(eps)
    ts, (r1, r2), exc, ksup = _evaluate(
        "ga-space", [kp, Mp], [3, 2], grid, lambda kj, Mj: _space_lhs(_d(kj), _d(Mj), e), variable
    )
    tol = tau if tau is not None else default_tolerance(ksup)
    return ResidualReport("GA_SPACE_1", ts, r1, tol, exc), ResidualReport("GA_SPACE_2", ts, r2, tol, exc)


@dataclass
class LinearComplexReport:
    """Plane residual against the space pair under ``M = eps k``.

    ``identity_error`` is ``sup |space_1 - plane - (24/5) theta3'|``,
    which vanishes identically because ``theta3 = (M - eps k)/4``.
    """

    plane: ResidualReport
    space_1: ResidualReport
    space_2: ResidualReport
    identity_error: float

    @property
    def verdict(self) -> bool:
        return self.plane.verdict and self.space_1.verdict and self.space_2.verdict

    def as_dict(self) -> dict:
        return {
            "plane": self.plane.as_dict(),
            "space_1": self.space_1.as_dict(),
            "space_2": self.space_2.as_dict(),
            "identity_error": self.identity_error,
            "verdict": self.verdict,
        }


def linear_complex_extremal_check(k, eps: int, grid=(0.0, 1.0, 101), *, tau: float | None = None,
                                  variable: str = "t") -> LinearComplexReport:
    """Evaluate the space pair with ``M = eps k`` next to the plane equation.

    The substitution makes ``theta3`` vanish identically, so the space
    curve lies in a linear complex; the first space residual then equals
    the plane residual and the second vanishes.
    """
    kp = as_profile(k)
    e = float(eps)

    def fn(kj):
        kd = _d(kj)
        Md = [e * v for v in kd]
        r1, r2 = _space_lhs(kd, Md, e)
        th3p = (Md[1] - e * kd[1]) / 4.0
        pl = _plane_lhs(kd, e)
        return [pl, r1, r2, r1 - pl - 4.8 * th3p]

    ts, (pl, r1, r2, ident), exc, ksup = _evaluate("linear-complex", [kp], [3], grid, fn, variable)
    tol = tau if tau is not None else default_tolerance(ksup)
    return LinearComplexReport(
        ResidualReport("GA_PLANE", ts, pl, tol, exc),
        ResidualReport("GA_SPACE_1", ts, r1, tol, exc),
        ResidualReport("GA_SPACE_2", ts, r2, tol, exc),
        float(np.max(np.abs(ident))) if ident.size else 0.0,
    )


@dataclass
class EquiaffineExtremalReport:
    """Equiaffine curvature and torsion on a grid and the extremality verdict."""

    grid: np.ndarray
    ell: np.ndarray
    m: np.ndarray
    tolerance: float
    equiaffine_parameter: bool

    @property
    def ell_sup(self) -> float:
        return float(np.max(np.abs(self.ell)))

    @property
    def m_sup(self) -> float:
        return float(np.max(np.abs(self.m)))

    @property
    def verdict(self) -> bool:
        return self.ell_sup + self.m_sup <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "equation": "EQUIAFFINE_SPACE",
            "ell_sup": self.ell_sup,
            "m_sup": self.m_sup,
            "ell_mean": float(np.mean(self.ell)),
            "m_mean": float(np.mean(self.m)),
            "equiaffine_parameter": self.equiaffine_parameter,
            "sup_norm": self.ell_sup + self.m_sup,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
        }


def equiaffine_space_extremal_check(spec: CurveSpec, grid: "Sequence[float] | int" = 41, *,
                                    tau: float = 1e-8) -> EquiaffineExtremalReport:
    """Equiaffine extremality: ``ell`` and ``m`` vanish identically.

    When the parameter of ``spec`` is equiaffine on the whole grid
    (``|a| <= 1e-8``) the values ``ell = -b`` and ``m = -c`` are reported;
    otherwise the unimodular-frame values are used.  The verdict does not
    depend on the choice since both vanish together.

    Examples
    --------
    >>> from gacurves.curves import builtin
    >>> equiaffine_space_extremal_check(builtin("cubic-parabola")).verdict
    True
    """
    if isinstance(grid, (int, np.integer)):
        ts = np.linspace(spec.interval[0], spec.interval[1], int(grid))
    else:
        ts = np.asarray(grid, dtype=float)
    a_vals = np.array([space_ode_coeffs(spec, t)[0].value for t in ts])
    equi = bool(np.all(np.abs(a_vals) <= 1e-8))
    vals = np.array([equiaffine_space_invariants(spec, t, reparametrize=not equi) for t in ts])
    return EquiaffineExtremalReport(ts, vals[:, 0], vals[:, 1], tau, equi)


@dataclass
class ProjectiveSpaceReport:
    """The projective space pair plus the reduction to constant curvatures."""

    residual_1: ResidualReport
    residual_2: ResidualReport
    k1_prime_sup: float
    k2_prime_sup: float

    @property
    def verdict(self) -> bool:
        return self.residual_1.verdict and self.residual_2.verdict

    @property
    def constant_curvatures(self) -> bool:
        tol = self.residual_1.tolerance
        return self.k1_prime_sup <= tol and self.k2_prime_sup <= tol

    @property
    def reduction_consistent(self) -> bool:
        """Extremal exactly when both curvatures are constant."""
        return self.verdict == self.constant_curvatures

    def as_dict(self) -> dict:
        return {
            "residual_1": self.residual_1.as_dict(),
            "residual_2": self.residual_2.as_dict(),
            "k1_prime_sup": self.k1_prime_sup,
            "k2_prime_sup": self.k2_prime_sup,
            "verdict": self.verdict,
            "constant_curvatures": self.constant_curvatures,
            "reduction_consistent": self.reduction_consistent,
        }


def projective_extremal_residuals(kind: str, curvatures, grid=(0.0, 1.0, 101), *,
                                  tau: float | None = None, variable: str = "t"):
    """Projective extremal equations.

    Parameters
    ----------
    kind : {"plane", "space"}
    curvatures : profile or pair of profiles
        ``k`` for plane curves, ``(k1, k2)`` for space curves.

    Returns
    -------
    ResidualReport or ProjectiveSpaceReport

    Examples
    --------
    >>> projective_extremal_residuals("plane", "0.7", (0.0, 1.0, 11)).sup_norm
    0.0
    """
    if kind == "plane":
        kp = as_profile(curvatures)
        ts, (res,), exc, ksup = _evaluate(
            "proj-plane", [kp], [3], grid,
            lambda kj: [(lambda d: d[3] + 8.0 * d[0] * d[1])(_d(kj))], variable,
        )
        return ResidualReport("PROJ_PLANE", ts, res, tau if tau is not None else default_tolerance(ksup), exc)
    if kind != "space":
        raise UsageError("kind must be 'plane' or 'space'")
    try:
        k1, k2 = curvatures
    except (TypeError, ValueError):
        raise UsageError("space curvatures must be a pair (k1, k2)") from None
    p1, p2 = as_profile(k1), as_profile(k2)

    def fn(a, b):
        d, e = _d(a), _d(b)
        r1 = d[3] + 16.0 * d[0] * d[1] - 0.5 * e[1]
        r2 = d[4] + 16.0 * d[0] * d[2] + 16.0 * d[1] ** 2 + 6.0 * d[1] - 0.5 * e[2]
        return [r1, r2, d[1], e[1]]

    ts, (r1, r2, dk1, dk2), exc, ksup = _evaluate("proj-space", [p1, p2], [4, 2], grid, fn, variable)
    tol = tau if tau is not None else default_tolerance(ksup)
    return ProjectiveSpaceReport(
        ResidualReport("PROJ_SPACE_1", ts, r1, tol, exc),
        ResidualReport("PROJ_SPACE_2", ts, r2, tol, exc),
        float(np.max(np.abs(dk1))) if dk1.size else 0.0,
        float(np.max(np.abs(dk2))) if dk2.size else 0.0,
    )


def linear_dependence_residual(result: ReconstructionResult) -> float:
    """Relative least-squares residual of ``k ~ c1 x1 + c2 x2 + c3``.

    For an extremal plane curve in general-affine arc length the
    curvature is an affine function of the coordinates.
    """
    seg = result.segments[0]
    kv = np.array([profile_jet(result.profile.k, t, 0, result.profile.variable).value for t in seg.t])
    A = np.column_stack([seg.x, np.ones(seg.t.size)])
    coef, *_ = np.linalg.lstsq(A, kv, rcond=None)
    return float(np.linalg.norm(A @ coef - kv) / max(np.linalg.norm(kv), 1e-300))
