"""Curve definitions: builtin catalog, parsed expressions and sampled points.

A :class:`CurveSpec` is an immutable description of a plane or space
curve together with its parameter interval and orientation.  The single
entry point :func:`eval_curve` returns one :class:`~gacurves.jet.Jet`
per coordinate, so every downstream module works with exact derivatives
when the curve is given analytically.

Sampled curves are differentiated with finite differences of accuracy
order four.  Derivatives of order five or more are refused for samples,
because the fifth-derivative formulas for the curvature turn raw data
into noise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import (
    CurveEvaluationError,
    DomainError,
    JetError,
    SampledOrderError,
    UnknownNameError,
    UsageError,
)
from .expr import Expr, parse_expression, parse_vector
from .jet import DEFAULT_ORDER, Jet, jet_variable

__all__ = [
    "CurveSpec",
    "BuiltinEntry",
    "BUILTINS",
    "builtin",
    "from_expressions",
    "from_samples",
    "from_jets",
    "eval_curve",
    "reverse_orientation",
    "read_samples_csv",
    "write_samples_csv",
    "fd_weights",
    "MAX_SAMPLED_ORDER",
]

#: highest derivative order served from sampled data
MAX_SAMPLED_ORDER = 4
#: minimum number of samples (stencil width for fourth derivatives)
MIN_SAMPLES = 9

JetSource = Callable[[float, int], Sequence[Jet]]


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """A plane or space curve with parameter interval and orientation.

    Use the constructors :func:`builtin`, :func:`from_expressions`,
    :func:`from_samples` or :func:`from_jets` rather than instantiating
    directly.

    Attributes
    ----------
    dimension : int
        2 or 3.
    source : str
        ``"builtin"``, ``"expressions"``, ``"samples"`` or ``"jets"``.
    interval : tuple of float
        ``(t_min, t_max)`` in the (possibly reversed) parameter.
    orientation : int
        +1 for the defining parameter, -1 after :func:`reverse_orientation`.
    """

    dimension: int
    source: str
    interval: tuple[float, float]
    orientation: int = 1
    exprs: tuple[Expr, ...] = ()
    params: tuple[tuple[str, float], ...] = ()
    name: str | None = None
    samples_t: np.ndarray | None = field(default=None, repr=False)
    samples_x: np.ndarray | None = field(default=None, repr=False)
    jet_fn: JetSource | None = field(default=None, repr=False)
    variable: str = "t"

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise UsageError(f"dimension must be 2 or 3, got {self.dimension}")
        if self.orientation not in (1, -1):
            raise UsageError("orientation must be +1 or -1")
        lo, hi = self.interval
        if not lo < hi:
            raise UsageError(f"empty parameter interval [{lo}, {hi}]")
        if self.source in ("builtin", "expressions") and len(self.exprs) != self.dimension:
            raise UsageError(
                f"{len(self.exprs)} coordinate expressions given for a {self.dimension}D curve"
            )
        if self.source == "samples":
            t = self.samples_t
            x = self.samples_x
            if t is None or x is None or x.shape != (t.size, self.dimension):
                raise UsageError("sample arrays do not match the curve dimension")
            if t.size < MIN_SAMPLES:
                raise UsageError(f"at least {MIN_SAMPLES} samples are needed, got {t.size}")
            if not np.all(np.diff(t) > 0):
                raise UsageError("sample grid must be strictly increasing")

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def max_order(self) -> int | None:
        """Highest derivative order available (``None`` means unlimited)."""
        return MAX_SAMPLED_ORDER if self.source == "samples" else None

    def describe(self) -> str:
        if self.source == "builtin":
            ps = ", ".join(f"{k}={v:g}" for k, v in self.params)
            return f"builtin {self.name}({ps})"
        if self.source == "expressions":
            return "(" + ", ".join(str(e) for e in self.exprs) + ")"
        return f"{self.source} curve"

    def with_interval(self, t_min: float, t_max: float) -> "CurveSpec":
        return replace(self, interval=(float(t_min), float(t_max)))

    def points(self, t: Sequence[float]) -> np.ndarray:
        """Coordinates at the parameter values ``t`` (shape ``(n, dim)``)."""
        return np.array([[j.value for j in eval_curve(self, ti, 0)] for ti in t])


# ----------------------------------------------------------------------
# builtin catalog
@dataclass(frozen=True)
class BuiltinEntry:
    """A named curve of the catalog.

    ``coords`` and ``interval`` are expression sources in ``t`` and in the
    parameters, which default to ``defaults``.
    """

    name: str
    coords: tuple[str, ...]
    defaults: Mapping[str, float]
    interval: tuple[str, str]
    description: str

    @property
    def dimension(self) -> int:
        return len(self.coords)


def _entry(name, coords, defaults, interval, description):
    return BuiltinEntry(name, tuple(coords), dict(defaults), tuple(str(v) for v in interval), description)


_ENTRIES = [
    # plane curves
    _entry("ellipse", ("a*cos(t)", "b*sin(t)"), {"a": 2.0, "b": 1.0}, ("0", "2*pi"),
           "ellipse (a cos t, b sin t); k = 0, eps = +1"),
    _entry("hyperbola", ("a*cosh(t)", "b*sinh(t)"), {"a": 1.0, "b": 1.0}, ("-2", "2"),
           "hyperbola (a cosh t, b sinh t); k = 0, eps = -1"),
    _entry("log-spiral", ("exp(gamma*t)*cos(alpha*t)", "exp(gamma*t)*sin(alpha*t)"),
           {"gamma": 1.0, "alpha": 1.0}, ("0", "2*pi"),
           "logarithmic spiral; k = -4 gamma / sqrt(gamma^2 + 9 alpha^2), eps = +1"),
    _entry("catenary", ("t", "cosh(t)"), {}, ("-2", "2"),
           "catenary (t, cosh t); affine inflections at cosh^2 t = 5/2"),
    _entry("rose", ("cos(n*t)*cos(t)", "cos(n*t)*sin(t)"), {"n": 1.0 / 3.0}, ("0", "3*pi"),
           "rose curve r = cos(n t), closed for n = 1/3 on [0, 3 pi]"),
    _entry("parabola", ("t", "t^2/2"), {}, ("-1", "1"),
           "parabola; equiaffine curvature vanishes identically"),
    _entry("ellipse-graph", ("t", "-(alpha^2 - t^2)^(1/2)"), {"alpha": 1.0},
           ("-0.9*alpha", "0.9*alpha"), "lower half of a circle as a graph; k = 0, eps = +1"),
    _entry("hyperbola-graph", ("t", "(alpha^2 + t^2)^(1/2)"), {"alpha": 1.0}, ("-2", "2"),
           "branch of a hyperbola as a graph; k = 0, eps = -1"),
    _entry("exp-graph", ("t", "exp(t)"), {}, ("-1", "1"), "graph of exp; k = -sqrt 2, eps = -1"),
    _entry("tlogt", ("t", "t*log(t)"), {}, ("0.5", "3"), "graph of t log t; k = -4, eps = +1"),
    _entry("power", ("t", "t^alpha"), {"alpha": 3.0}, ("0.5", "2"),
           "graph of t^alpha (t > 0); k = -2(alpha+1)/sqrt|(2 alpha-1)(alpha-2)|"),
    # space curves
    _entry("circular-helix", ("t", "cos(t)", "sin(t)"), {}, ("0", "2*pi"),
           "circular helix; k = M = 0, eps = +1"),
    _entry("hyperbolic-helix", ("t", "cosh(t)", "sinh(t)"), {}, ("-2", "2"),
           "hyperbolic helix; k = M = 0, eps = -1"),
    _entry("space-log-spiral", ("exp(-2*lam*t)", "exp(lam*t)*cos(p*t)", "exp(lam*t)*sin(p*t)"),
           {"lam": 0.5, "p": 2.0}, ("-1", "1"),
           "space logarithmic spiral; k = 0, M = 2 lam (p^2+lam^2) |3 lam^2 - p^2|^(-3/2)"),
    _entry("exp3", ("exp(lam*t)", "exp(mu*t)", "exp(nu*t)"), {"lam": 1.0, "mu": 2.0, "nu": -0.5},
           ("-1", "1"), "three distinct exponentials"),
    _entry("mk", ("t", "exp(lam*t)", "t*exp(lam*t)"), {"lam": 1.0}, ("-1", "1"),
           "(t, e^(lam t), t e^(lam t)); eps = -1, k = -sqrt 2 sign(lam), M = sqrt 2 sign(lam)"),
    _entry("viviani", ("1+cos(2*t)", "sin(2*t)", "2*sin(t)"), {}, ("-1.4", "1.4"),
           "Viviani's curve; singular where cos t = 0 or cos^2 t = 7/31"),
    _entry("torus-knot", ("(4+cos(3*t))*cos(t)", "(4+cos(3*t))*sin(t)", "sin(3*t)"), {},
           ("0", "2*pi"), "(2,3)-type torus knot on a torus of radii 4 and 1"),
    _entry("space-row1", ("t", "exp(lam*t)", "exp(mu*t)"), {"lam": 1.0, "mu": 2.0}, ("-1", "1"),
           "row 1 of the constant-curvature table"),
    _entry("space-row2", ("exp(t)", "t*exp(t)", "exp(lam*t)"), {"lam": -1.0}, ("-1", "1"),
           "row 2 of the constant-curvature table"),
    _entry("space-row3", ("t", "t^2/2", "exp(lam*t)"), {"lam": 1.0}, ("-1", "1"),
           "row 3 of the constant-curvature table"),
    _entry("space-row4", ("exp(t)", "t*exp(t)", "t^2*exp(t)"), {}, ("-1", "1"),
           "row 4 of the constant-curvature table"),
    _entry("space-row5", ("t", "exp(t)*cos(p*t)", "exp(t)*sin(p*t)"), {"p": 2.0}, ("-1", "1"),
           "row 5 of the constant-curvature table"),
    _entry("space-row6", ("exp(lam*t)", "cosh(p*t)", "sinh(p*t)"), {"lam": 1.0, "p": 2.0},
           ("-1", "1"), "row 6 of the constant-curvature table"),
    _entry("space-row7", ("exp(lam*t)", "exp(mu*t)*cos(p*t)", "exp(mu*t)*sin(p*t)"),
           {"lam": 1.0, "mu": 0.5, "p": 2.0}, ("-1", "1"), "row 7 of the constant-curvature table"),
    _entry("space-row8", ("t", "t^2/2", "t^3/6"), {}, ("-1", "1"),
           "row 8 of the constant-curvature table (cubic parabola, L identically 0)"),
    _entry("cubic-parabola", ("t", "t^2/2", "t^3/6"), {}, ("-1", "1"),
           "cubic parabola; equiaffine curvatures vanish"),
    _entry("equiaffine-1", ("exp(lam*t)", "exp(mu*t)", "exp(-(lam+mu)*t)"), {"lam": 1.0, "mu": 2.0},
           ("-1", "1"), "equiaffine constant-curvature curve 1"),
    _entry("equiaffine-2", ("t*exp(lam*t)", "exp(lam*t)", "exp(-2*lam*t)"), {"lam": 1.0},
           ("-1", "1"), "equiaffine constant-curvature curve 2"),
    _entry("equiaffine-3", ("exp(-2*alpha*t)", "exp(alpha*t)*cos(beta*t)", "exp(alpha*t)*sin(beta*t)"),
           {"alpha": 1.0, "beta": 2.0}, ("-1", "1"), "equiaffine constant-curvature curve 3"),
    _entry("equiaffine-4", ("t", "cosh(t)", "sinh(t)"), {}, ("-2", "2"),
           "equiaffine constant-curvature curve 4 (hyperbolic helix, ell = -1)"),
    _entry("equiaffine-5", ("t", "cos(t)", "sin(t)"), {}, ("0", "2*pi"),
           "equiaffine constant-curvature curve 5 (circular helix, ell = 1)"),
    _entry("equiaffine-6", ("t", "t^2/2", "t^3/6"), {}, ("-1", "1"),
           "equiaffine constant-curvature curve 6 (cubic parabola, ell = 0)"),
    # curves of constant projective curvature, as affine charts (y1/y0, y2/y0, y3/y0)
    # of the homogeneous solutions [y0, y1, y2, y3]
    _entry("cv1", ("exp((2*lam+mu+nu)*t)", "exp((lam+2*mu+nu)*t)", "exp((lam+mu+2*nu)*t)"),
           {"lam": 1.0, "mu": 2.0, "nu": -0.5}, ("-1", "1"),
           "[e^(-(lam+mu+nu)t), e^(lam t), e^(mu t), e^(nu t)]"),
    _entry("cv2", ("t", "exp((3*lam+mu)*t)", "exp((lam+3*mu)*t)"), {"lam": 1.0, "mu": -0.3},
           ("-1", "1"), "[e^(-(lam+mu)t), t e^(-(lam+mu)t), e^(2 lam t), e^(2 mu t)]"),
    _entry("cv3", ("exp(2*(mu-lam)*t)", "exp(-(3*lam+mu)*t)*cos(p*t)", "exp(-(3*lam+mu)*t)*sin(p*t)"),
           {"lam": 1.0, "mu": 0.5, "p": 2.0}, ("-1", "1"),
           "[e^(2 lam t), e^(2 mu t), e^(-(lam+mu)t) cos pt, e^(-(lam+mu)t) sin pt]"),
    _entry("cv4", ("tan(p*t)", "exp(-2*lam*t)*cos(q*t)/cos(p*t)", "exp(-2*lam*t)*sin(q*t)/cos(p*t)"),
           {"lam": 0.5, "p": 1.0, "q": 2.0}, ("-1", "1"),
           "[e^(lam t) cos pt, e^(lam t) sin pt, e^(-lam t) cos qt, e^(-lam t) sin qt]"),
    _entry("cv5", ("t", "exp(2*lam*t)*cos(p*t)", "exp(2*lam*t)*sin(p*t)"), {"lam": 0.5, "p": 2.0},
           ("-1", "1"), "[e^(-lam t), t e^(-lam t), e^(lam t) cos pt, e^(lam t) sin pt]"),
    _entry("cv6", ("t", "exp(-2*lam*t)", "t*exp(-2*lam*t)"), {"lam": 1.0}, ("-1", "1"),
           "[e^(lam t), t e^(lam t), e^(-lam t), t e^(-lam t)]"),
    _entry("cv7", ("tan(p*t)", "t", "t*tan(p*t)"), {"p": 1.0}, ("-1", "1"),
           "[cos pt, sin pt, t cos pt, t sin pt]"),
    _entry("cv8", ("t", "t^2", "exp(-4*lam*t)"), {"lam": 1.0}, ("-1", "1"),
           "[e^(lam t), t e^(lam t), t^2 e^(lam t), e^(-3 lam t)]"),
    _entry("cv9", ("t", "t^2", "t^3"), {}, ("-1", "1"), "[1, t, t^2, t^3]"),
]

#: catalog of named curves, keyed by name
BUILTINS: dict[str, BuiltinEntry] = {e.name: e for e in _ENTRIES}


def builtin(name: str, **params: float) -> CurveSpec:
    """Curve from the builtin catalog, with parameters overriding defaults.

    >>> spec = builtin("ellipse", a=2, b=1)
    >>> [(j.coeffs + 0.0).tolist() for j in eval_curve(spec, 0.0, 2)]
    [[2.0, 0.0, -1.0], [0.0, 1.0, 0.0]]
    """
    try:
        entry = BUILTINS[name]
    except KeyError:
        raise UnknownNameError(f"unknown builtin curve {name!r}; known: {', '.join(sorted(BUILTINS))}") from None
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise UsageError(f"builtin {name!r} has no parameter(s) {sorted(unknown)}")
    values = {**entry.defaults, **{k: float(v) for k, v in params.items()}}
    lo, hi = (float(parse_expression(s).evaluate(values)) for s in entry.interval)
    return CurveSpec(
        dimension=entry.dimension,
        source="builtin",
        interval=(lo, hi),
        exprs=tuple(parse_expression(c) for c in entry.coords),
        params=tuple(sorted(values.items())),
        name=name,
    )


def from_expressions(
    coords: "str | Sequence[str | Expr]",
    interval: tuple[float, float],
    params: Mapping[str, float] | None = None,
    variable: str = "t",
) -> CurveSpec:
    """Curve given by one expression per coordinate.

    ``coords`` is either a parenthesized vector source such as
    ``"(1+cos(2*t), sin(2*t), 2*sin(t))"`` or a sequence of sources.
    """
    if isinstance(coords, str):
        exprs = parse_vector(coords)
    else:
        exprs = tuple(c if isinstance(c, Expr) else parse_expression(c) for c in coords)
    params = {k: float(v) for k, v in (params or {}).items()}
    free = set().union(*(e.names() for e in exprs)) - set(params) - {variable}
    if free:
        raise UnknownNameError(f"unbound names in curve expressions: {sorted(free)}")
    return CurveSpec(
        dimension=len(exprs),
        source="expressions",
        interval=(float(interval[0]), float(interval[1])),
        exprs=exprs,
        params=tuple(sorted(params.items())),
        variable=variable,
    )


def from_samples(t: Sequence[float], x: Sequence[Sequence[float]]) -> CurveSpec:
    """Curve given by samples ``x[i] = x(t[i])`` on an increasing grid."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise UsageError("samples must be a 2D array of shape (n, dim)")
    return CurveSpec(
        dimension=x.shape[1],
        source="samples",
        interval=(float(t[0]), float(t[-1])),
        samples_t=t,
        samples_x=x,
    )


def from_jets(fn: JetSource, dimension: int, interval: tuple[float, float]) -> CurveSpec:
    """Curve whose jets are produced by ``fn(t, order)`` directly."""
    return CurveSpec(dimension=dimension, source="jets", interval=tuple(map(float, interval)), jet_fn=fn)


def reverse_orientation(spec: CurveSpec) -> CurveSpec:
    """Reparametrize by ``u = -t``; the interval is negated and swapped."""
    lo, hi = spec.interval
    return replace(spec, interval=(-hi, -lo), orientation=-spec.orientation)


# ----------------------------------------------------------------------
# evaluation
def _check_interval(spec: CurveSpec, t: float) -> None:
    lo, hi = spec.interval
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if not (lo - slack <= t <= hi + slack):
        raise CurveEvaluationError(f"t = {t!r} outside the interval [{lo!r}, {hi!r}]")


def _flip(jets: Sequence[Jet]) -> list[Jet]:
    out = []
    for j in jets:
        c = j.coeffs
        c[1::2] *= -1.0
        out.append(Jet(c))
    return out


def eval_curve(spec: CurveSpec, t: float, order: int = DEFAULT_ORDER) -> list[Jet]:
    """Jets of the coordinates of ``spec`` at parameter ``t``.

    Parameters
    ----------
    spec : CurveSpec
    t : float
        Parameter value inside ``spec.interval``.
    order : int
        Truncation order of the returned jets.

    Returns
    -------
    list of Jet
        One jet per coordinate.

    Raises
    ------
    CurveEvaluationError
        If ``t`` is outside the interval or a coordinate hits a domain
        error (the message names the coordinate).
    SampledOrderError
        If ``order`` exceeds four on a sampled curve.
    """
    t = float(t)
    _check_interval(spec, t)
    s = spec.orientation
    base_t = s * t
    if spec.source in ("builtin", "expressions"):
        env: dict = dict(spec.params)
        env[spec.variable] = jet_variable(base_t, max(order, 1))
        jets = []
        for i, e in enumerate(spec.exprs):
            try:
                v = e.evaluate(env)
            except (JetError, DomainError) as exc:
                raise CurveEvaluationError(f"coordinate {i + 1} at t = {base_t!r}: {exc}") from exc
            if not isinstance(v, Jet):
                v = Jet(np.r_[float(v), np.zeros(max(order, 1))])
            jets.append(v.truncate(order))
    elif spec.source == "samples":
        jets = _sample_jets(spec.samples_t, spec.samples_x, base_t, order)
    elif spec.source == "jets":
        # a jet source may serve fewer orders than requested; downstream
        # code reports the missing derivatives
        jets = [j.truncate(min(order, j.order)) for j in spec.jet_fn(base_t, order)]
    else:  # pragma: no cover - guarded by construction
        raise UsageError(f"unknown curve source {spec.source!r}")
    for i, j in enumerate(jets):
        if not np.all(np.isfinite(j.coeffs)):
            raise CurveEvaluationError(f"coordinate {i + 1} is not finite at t = {base_t!r}")
    return _flip(jets) if s < 0 else list(jets)


# ----------------------------------------------------------------------
# finite differences
def fd_weights(offsets: Sequence[float], m: int) -> np.ndarray:
    """Weights ``w`` with ``f^(m)(0) ~ sum_i w_i f(offsets_i)``.

    Solves the moment (Vandermonde) system, which is exact for polynomials
    of degree below ``len(offsets)``.
    """
    z = np.asarray(offsets, dtype=float)
    n = z.size
    if m >= n:
        raise ValueError("need more points than the derivative order")
    scale = np.max(np.abs(z)) or 1.0
    zs = z / scale
    V = np.vander(zs, n, increasing=True).T  # V[p, i] = zs_i**p
    rhs = np.zeros(n)
    rhs[m] = math.factorial(m)
    w = np.linalg.solve(V, rhs)
    return w / scale**m


def _stencil_size(order: int) -> int:
    # m + 4 points give accuracy order four; use an odd count for symmetry
    n = order + 4
    return n + 1 if n % 2 == 0 else n


def _sample_jets(ts: np.ndarray, xs: np.ndarray, t: float, order: int) -> list[Jet]:
    if order > MAX_SAMPLED_ORDER:
        raise SampledOrderError(
            f"derivatives of order {order} requested from sampled data; at most "
            f"{MAX_SAMPLED_ORDER} are available (fifth and higher derivatives are refused for samples)"
        )
    n = ts.size
    width = _stencil_size(max(order, 1))
    i0 = int(np.argmin(np.abs(ts - t)))
    lo = min(max(i0 - width // 2, 0), n - width)
    idx = np.arange(lo, lo + width)
    offs = ts[idx] - t
    out = np.zeros((xs.shape[1], order + 1))
    for m in range(order + 1):
        if m == 0 and abs(ts[i0] - t) <= 1e-14 * max(1.0, abs(t)):
            out[:, 0] = xs[i0]
            continue
        w = fd_weights(offs, m)
        out[:, m] = (w @ xs[idx]) / math.factorial(m)
    return [Jet(row) for row in out]


# ----------------------------------------------------------------------
# CSV input/output
def read_samples_csv(path_or_text: "str | Path", *, text: bool = False) -> CurveSpec:
    """Read samples from CSV with header ``t,x1,x2[,x3]``."""
    if text:
        handle = io.StringIO(str(path_or_text))
    else:
        handle = open(path_or_text, newline="")
    with handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise UsageError("empty samples file") from None
        if header not in (["t", "x1", "x2"], ["t", "x1", "x2", "x3"]):
            raise UsageError(f"samples header must be t,x1,x2[,x3], got {','.join(header)}")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise UsageError("ragged samples file")
    return from_samples(data[:, 0], data[:, 1:])


def format_number(v: float) -> str:
    """17 significant digits, enough for an exact round trip."""
    return f"{float(v):.17g}" if np.isfinite(v) else ("nan" if np.isnan(v) else ("inf" if v > 0 else "-inf"))


def write_samples_csv(t: Sequence[float], x: np.ndarray, path: "str | Path | None" = None) -> str:
    """Write samples with header ``t,x1,x2[,x3]``; returns the text."""
    x = np.asarray(x, dtype=float)
    dim = x.shape[1]
    lines = [",".join(["t"] + [f"x{i + 1}" for i in range(dim)])]
    for ti, row in zip(t, x):
        lines.append(",".join(format_number(v) for v in (ti, *row)))
    out = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(out)
    return out
