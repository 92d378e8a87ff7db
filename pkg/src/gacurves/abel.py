"""Graph immersions with prescribed curvature via Abel equations.

For a convex graph ``(t, f(t))`` put ``mu = (f'')^(-2/3) > 0``.  The
curvature condition becomes

    mu (mu''')^2 = -eps (k^2 / 2) (mu'')^3.

Regarding ``w = dmu/dt`` as a function of ``x = mu`` and writing
``w = sigma exp(-eps int s^2 dx)`` (first reduction) or
``w = sigma exp(-eps int s^(-2) dx)`` (second reduction) turns it into

    first kind:   eps s' = k s^2 / (2 sqrt(2x)) + s^3
    second kind:  s s'   = k s / (2 sqrt(2x)) - eps

where ``k`` is the curvature expressed as a function of ``x = mu``.
:func:`abel_solve` integrates either equation and undoes the chain
``s -> w(mu) -> t(mu) -> f'' = mu^(-3/2) -> f`` with quadratures carried
along in the same ODE system.

Signs: the sign ``sigma`` of ``w`` decides the sign of the recovered
curvature.  With ``sigma = eps sign(s)`` (first kind) or
``sigma = -sign(s)`` (second kind) the graph has curvature ``+k``; the
opposite sign gives the reflected graph with curvature ``-k``.  The
parameter origin is ``t(x0) = 0`` and ``f(x0) = f'(x0) = 0``; both are
affine normalizations and do not change the curvature.

The two reductions are related by ``s_2 = -eps / s_1``, which gives the
same ``w`` and hence the same graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .curves import CurveSpec, from_jets, from_samples
from .errors import (
    AbelSingularityError,
    DomainError,
    GACurveError,
    IntegrationError,
    UsageError,
)
from .extremal import ResidualReport, make_grid
from .jet import Jet, exp, jet_constant, jet_variable, sqrt
from .plane import plane_invariants_at
from .profiles import Profile, as_profile, profile_jet, profile_value
from .taylor import picard_jet, revert_series

__all__ = [
    "REDUCTIONS",
    "AbelProblem",
    "AbelRoundtrip",
    "AbelResult",
    "abel_rhs",
    "abel_solve",
    "closed_form_a",
    "closed_form_s",
    "mu_equation_residual",
]

REDUCTIONS = ("first", "second")

#: |s| beyond which the first-kind solution is treated as blowing up
BLOWUP = 1e8
#: |s| below which the second-kind solution has reached its singular set
S_FLOOR = 1e-10


@dataclass(frozen=True)
class AbelProblem:
    """Input of :func:`abel_solve`.

    Attributes
    ----------
    k : profile
        Curvature as a function of ``x = mu`` (expression in ``x``, a
        number, samples or a jet callable).
    eps : int
        Sign ``+1`` or ``-1``.
    reduction : str
        ``"first"`` or ``"second"``.
    x0, s0 : float
        Initial condition ``s(x0) = s0`` with ``x0 > 0``.
    x1 : float
        End of the window in ``x``; must be positive as well.
    n : int
        Number of output nodes.
    sigma : int or None
        Sign of ``w``; ``None`` selects the branch with curvature ``+k``.
    """

    k: Profile
    eps: int
    reduction: str = "first"
    x0: float = 1.0
    s0: float = 1.0
    x1: float = 2.0
    n: int = 101
    sigma: int | None = None
    variable: str = "x"

    def __post_init__(self):
        object.__setattr__(self, "k", as_profile(self.k))
        if self.eps not in (1, -1):
            raise UsageError("eps must be +1 or -1")
        if self.reduction not in REDUCTIONS:
            raise UsageError(f"reduction must be one of {REDUCTIONS}")
        if not (self.x0 > 0 and self.x1 > 0) or self.x0 == self.x1:
            raise UsageError("the x-window must be positive and nonempty")
        if self.s0 == 0 or not math.isfinite(self.s0):
            raise UsageError("s0 must be finite and nonzero")
        if self.n < 2:
            raise UsageError("n must be at least 2")
        if self.sigma not in (None, 1, -1):
            raise UsageError("sigma must be +1, -1 or None")

    @property
    def w_sign(self) -> int:
        if self.sigma is not None:
            return self.sigma
        sgn = 1 if self.s0 > 0 else -1
        return self.eps * sgn if self.reduction == "first" else -sgn


def closed_form_a(k: float, eps: int, branch: int = 1) -> float:
    """Constant ``a`` of the solution ``s = a / sqrt(2x)`` for constant ``k``.

    ``a = (-k + branch sqrt(k^2 - 16 eps)) / 4``; real when
    ``k^2 >= 16 eps``.
    """
    disc = k * k - 16.0 * eps
    if disc < 0:
        raise DomainError("sqrt", disc, "no power-law solution for this (k, eps)")
    return (-k + branch * math.sqrt(disc)) / 4.0


def closed_form_s(k: float, eps: int, x, *, reduction: str = "first", branch: int = 1,
                  a: float | None = None):
    """Closed-form solutions for constant curvature.

    For ``k != 0`` this is ``a / sqrt(2x)`` with :func:`closed_form_a`;
    for ``k = 0`` it is ``1 / sqrt(eps (a - 2x))`` with the free constant
    ``a``.  Second-kind solutions are ``-eps / s`` of the first-kind ones.
    """
    x = np.asarray(x, dtype=float)
    if k == 0:
        if a is None:
            raise UsageError("the k = 0 solution needs the constant a")
        arg = eps * (a - 2.0 * x)
        if np.any(arg <= 0):
            raise DomainError("sqrt", float(np.min(arg)), "outside the domain of the k = 0 solution")
        s1 = 1.0 / np.sqrt(arg)
    else:
        s1 = closed_form_a(k, eps, branch) / np.sqrt(2.0 * x)
    if reduction == "first":
        return s1
    if reduction == "second":
        return -eps / s1
    raise UsageError(f"reduction must be one of {REDUCTIONS}")


def abel_rhs(problem: AbelProblem):
    """Right-hand side ``s'(x)`` of the chosen Abel equation."""
    k, eps, var = problem.k, problem.eps, problem.variable

    if problem.reduction == "first":
        def rhs(x, s):
            return eps * (profile_value(k, x, var) * s * s / (2.0 * math.sqrt(2.0 * x)) + s ** 3)
    else:
        def rhs(x, s):
            return (profile_value(k, x, var) * s / (2.0 * math.sqrt(2.0 * x)) - eps) / s
    return rhs


def _jet_rhs(problem: AbelProblem, kj: Jet):
    eps = problem.eps
    if problem.reduction == "first":
        return lambda X, S: eps * (kj * S * S / (2.0 * sqrt(2.0 * X)) + S * S * S)
    return lambda X, S: (kj * S / (2.0 * sqrt(2.0 * X)) - eps) / S


@dataclass
class AbelRoundtrip:
    """Curvature of the reconstructed graph at the output nodes."""

    x: np.ndarray
    t: np.ndarray
    k_input: np.ndarray
    k_output: np.ndarray
    eps_output: np.ndarray
    mu_residual: np.ndarray

    @property
    def k_error(self) -> float:
        return float(np.max(np.abs(self.k_output - self.k_input))) if self.x.size else 0.0

    @property
    def mu_residual_sup(self) -> float:
        return float(np.max(np.abs(self.mu_residual))) if self.x.size else 0.0

    def eps_ok(self, eps: int) -> bool:
        return bool(np.all(self.eps_output == eps))

    def as_dict(self, eps: int) -> dict:
        return {
            "points": int(self.x.size),
            "k_error": self.k_error,
            "eps_ok": self.eps_ok(eps),
            "mu_residual": self.mu_residual_sup,
        }


@dataclass
class AbelResult:
    """Numeric Abel solution and the graph built from it.

    Arrays are indexed by the output nodes ``x`` (values of ``mu``).
    ``t`` and ``f`` are the graph coordinates, ``fp`` is ``f'``.
    """

    problem: AbelProblem
    x: np.ndarray
    s: np.ndarray
    W: np.ndarray
    t: np.ndarray
    fp: np.ndarray
    f: np.ndarray
    dense: object
    nfev: int
    roundtrip: AbelRoundtrip | None = None
    extra: dict = field(default_factory=dict)

    @property
    def sigma(self) -> int:
        return self.problem.w_sign

    @property
    def w(self) -> np.ndarray:
        return self.sigma * np.exp(-self.problem.eps * self.W)

    @property
    def mu(self) -> np.ndarray:
        return self.x

    def closed_form_error(self, **kw) -> float:
        """Sup distance between ``s`` and :func:`closed_form_s` for constant ``k``."""
        k = self.problem.k
        if not isinstance(k, float):
            raise UsageError("closed forms exist for constant k only")
        ref = closed_form_s(k, self.problem.eps, self.x, reduction=self.problem.reduction, **kw)
        return float(np.max(np.abs(self.s - ref)))

    def node_jets(self, i: int, order: int = 6) -> tuple[Jet, Jet, Jet]:
        """Jets at node ``i`` of ``t``, ``f(t)`` and ``mu(t)`` in the variable ``t``.

        The Abel solution is expanded by Picard iteration, the quadratures
        are integrated termwise and ``t(mu)`` is reverted, so the jets are
        exact up to the accuracy of the node values.
        """
        p = self.problem
        xi = float(self.x[i])
        kj = profile_jet(p.k, xi, order, p.variable)
        S = picard_jet(_jet_rhs(p, kj), xi, float(self.s[i]), order)
        integrand = S * S if p.reduction == "first" else 1.0 / (S * S)
        Wj = integrand.integrate(float(self.W[i]))
        wj = p.w_sign * exp(-p.eps * Wj)
        Tj = (1.0 / wj).integrate(float(self.t[i]))
        mu_t = revert_series(Tj, xi)
        fpp = mu_t ** -1.5
        fp = fpp.integrate(float(self.fp[i]))
        f = fp.integrate(float(self.f[i]))
        return jet_variable(float(self.t[i]), f.order), f, mu_t

    def graph_at_node(self, i: int, order: int = 6) -> CurveSpec:
        """Graph ``(t, f(t))`` as a jet curve valid at ``t = t[i]`` only."""
        tj, fj, _ = self.node_jets(i, order)
        ti = float(self.t[i])

        def source(t, n):
            if t != ti:
                raise UsageError("node graph jets are available at their node only")
            return [tj.truncate(min(n, tj.order)), fj.truncate(min(n, fj.order))]

        return from_jets(source, 2, (ti - 1.0, ti + 1.0))

    def graph_samples(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """``(t, f)`` on a uniform ``t`` grid, by inverting ``t(x)`` with the dense output."""
        n = n or self.problem.n
        lo, hi = sorted((float(self.t[0]), float(self.t[-1])))
        tg = np.linspace(lo, hi, n)
        xs = np.empty(n)
        a, b = sorted((self.problem.x0, float(self.x[-1])))
        for j, tj in enumerate(tg):
            if j in (0, n - 1):
                xs[j] = self.x[0] if math.isclose(tj, self.t[0], abs_tol=1e-14) else self.x[-1]
                continue
            xs[j] = optimize.brentq(lambda x: self.dense(x)[2] - tj, a, b, xtol=1e-14)
        return tg, np.array([self.dense(x)[4] for x in xs])

    def graph_spec(self, n: int | None = None) -> CurveSpec:
        tg, fg = self.graph_samples(n)
        return from_samples(tg, np.column_stack([tg, fg]))

    def as_dict(self) -> dict:
        out = {
            "reduction": self.problem.reduction,
            "eps": self.problem.eps,
            "sigma": self.sigma,
            "x_window": [float(self.x[0]), float(self.x[-1])],
            "t_window": [float(self.t[0]), float(self.t[-1])],
            "points": int(self.x.size),
            "nfev": int(self.nfev),
        }
        if self.roundtrip is not None:
            out["roundtrip"] = self.roundtrip.as_dict(self.problem.eps)
        out.update(self.extra)
        return out


def _system(problem: AbelProblem):
    rhs = abel_rhs(problem)
    eps, sigma, first = problem.eps, problem.w_sign, problem.reduction == "first"

    def fun(x, y):
        s, W, _, F1, _ = y
        w = sigma * math.exp(-eps * W)
        return [rhs(x, s), s * s if first else 1.0 / (s * s), 1.0 / w, x ** -1.5 / w, F1 / w]

    return fun


def _events(problem: AbelProblem):
    def blowup(x, y):
        return BLOWUP - abs(y[0])

    def floor(x, y):
        return abs(y[0]) - S_FLOOR

    blowup.terminal = True
    floor.terminal = True
    return [blowup, floor]


def abel_solve(problem: AbelProblem, *, rtol: float = 1e-12, atol: float = 1e-14,
               roundtrip: bool = True, roundtrip_points: int = 21, jet_order: int = 6) -> AbelResult:
    """Integrate the Abel equation of ``problem`` and rebuild the graph.

    Parameters
    ----------
    problem : AbelProblem
    rtol, atol : float
        Tolerances of the RK45 integration of the combined system
        ``(s, int s^(+-2), t, f', f)`` in the variable ``x``.
    roundtrip : bool
        Recompute the plane invariants of the graph at up to
        ``roundtrip_points`` nodes and compare them with ``k``.

    Raises
    ------
    AbelSingularityError
        When ``s`` blows up, reaches ``0`` or the integrator stops early;
        the abscissa of failure is attached.

    Examples
    --------
    >>> r = abel_solve(AbelProblem(k=-math.sqrt(2), eps=-1, x0=1.0, s0=1.0, x1=2.0))
    >>> r.roundtrip.k_error < 1e-6
    True
    """
    xs = np.linspace(problem.x0, problem.x1, problem.n)
    y0 = [problem.s0, 0.0, 0.0, 0.0, 0.0]
    try:
        sol = integrate.solve_ivp(_system(problem), (problem.x0, problem.x1), y0, method="RK45",
                                  t_eval=xs, dense_output=True, rtol=rtol, atol=atol,
                                  events=_events(problem))
    except (ZeroDivisionError, OverflowError, GACurveError) as exc:
        raise AbelSingularityError(f"Abel integration failed: {exc}", float("nan")) from exc
    if sol.status != 0 or sol.t.size != xs.size:
        x_fail = float(sol.t[-1]) if sol.t.size else problem.x0
        if sol.sol is not None:
            # t_eval hides the last accepted step; the dense solution knows it
            x_fail = float(sol.sol.t_max)
        for ev in sol.t_events or []:
            if len(ev):
                x_fail = float(ev[0])
        reason = "s left the admissible range" if sol.status == 1 else sol.message
        raise AbelSingularityError(f"Abel solution singular ({reason})", x_fail)
    Y = sol.y
    result = AbelResult(problem, sol.t, Y[0], Y[1], Y[2], Y[3], Y[4], sol.sol, int(sol.nfev))
    if roundtrip:
        result.roundtrip = _roundtrip(result, roundtrip_points, jet_order)
    return result


def _roundtrip(result: AbelResult, m: int, order: int) -> AbelRoundtrip:
    p = result.problem
    idx = np.unique(np.linspace(0, result.x.size - 1, min(m, result.x.size)).round().astype(int))
    kin, kout, eout, mres, xs, ts = [], [], [], [], [], []
    for i in idx:
        try:
            spec = result.graph_at_node(int(i), order)
            rec = plane_invariants_at(spec, float(result.t[i]))
            _, _, mu_t = result.node_jets(int(i), order)
        except GACurveError:
            continue
        kx = profile_value(p.k, float(result.x[i]), p.variable)
        xs.append(result.x[i])
        ts.append(result.t[i])
        kin.append(kx)
        kout.append(rec.k)
        eout.append(rec.eps)
        mres.append(_mu_residual_from_jet(mu_t, kx, p.eps))
    return AbelRoundtrip(np.array(xs), np.array(ts), np.array(kin), np.array(kout), np.array(eout),
                         np.array(mres))


def _mu_residual_from_jet(mu: Jet, k: float, eps: int) -> float:
    """Relative residual of ``mu (mu''')^2 + eps (k^2/2) (mu'')^3``."""
    m0, m2, m3 = mu.derivative(0), mu.derivative(2), mu.derivative(3)
    if m0 <= 0:
        raise DomainError("mu", m0, "mu must be positive")
    lhs = m0 * m3 * m3
    rhs = eps * 0.5 * k * k * m2 ** 3
    return (lhs + rhs) / (abs(lhs) + abs(rhs) + 1e-300)


def mu_equation_residual(mu, k, eps: int, grid=(0.0, 1.0, 101), *, variable: str = "t",
                         relative: bool = False, tau: float = 1e-7) -> ResidualReport:
    """Pointwise residual of ``mu (mu''')^2 + eps (k^2/2) (mu'')^3``.

    Parameters
    ----------
    mu, k : profile
        Functions of ``variable``; ``mu`` must be positive.
    relative : bool
        Divide by ``|mu (mu''')^2| + |(k^2/2)(mu'')^3|`` (zero residuals
        stay zero).

    Raises
    ------
    DomainError
        If ``mu <= 0`` at a grid point.

    Examples
    --------
    >>> mu_equation_residual("exp(-2*t/3)", -math.sqrt(2), -1).sup_norm < 1e-15
    True
    """
    if eps not in (1, -1):
        raise UsageError("eps must be +1 or -1")
    mu_p, k_p = as_profile(mu), as_profile(k)
    g = make_grid(grid)
    res = np.empty(g.size)
    for j, t in enumerate(g):
        mj = profile_jet(mu_p, t, 3, variable)
        kv = profile_value(k_p, t, variable)
        m0, m2, m3 = mj.derivative(0), mj.derivative(2), mj.derivative(3)
        if m0 <= 0:
            raise DomainError("mu", m0, f"mu must be positive (t = {t!r})")
        lhs = m0 * m3 * m3
        rhs = eps * 0.5 * kv * kv * m2 ** 3
        r = lhs + rhs
        if relative:
            d = abs(lhs) + abs(rhs)
            r = r / d if d > 0 else 0.0
        res[j] = r
    return ResidualReport("MU", g, res, tau)
