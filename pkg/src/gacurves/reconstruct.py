"""Curves from prescribed general-affine curvatures.

Given ``k`` (and ``M`` for space curves) as functions of general-affine
arc length, the curve is the solution of the linear ODE

* plane: ``x''' = -(3/2) k x'' - (eps + k'/2 + k^2/2) x'``,
* space: ``x'''' = -3k x''' - (2k' + 11k^2/4 + eps) x''
  - (M + eps k/2 + k''/2 + 7kk'/4 + 3k^3/4) x'``,

determined up to a general-affine motion by the initial frame.  The
integration uses :func:`scipy.integrate.solve_ivp` (Dormand-Prince
RK45).  The state also carries ``int k ds`` so that the log-determinant
identity of the frame can be checked without quadrature error.

Invariants of the result are recomputed at the integrator's output nodes
from exact Taylor jets of the ODE solution with the node's state as
initial data (see :mod:`gacurves.taylor`); the dense-output interpolant
is only used for plotting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .curves import CurveSpec, from_jets
from .errors import (
    CurveEvaluationError,
    DegenerateCurveError,
    GACurveError,
    IntegrationError,
    JetError,
    NormalizationError,
    UsageError,
)
from .jet import DEFAULT_ORDER, Jet
from .plane import plane_invariants_at
from .profiles import Profile, as_profile, profile_jet, profile_source
from .space import ga_ode_coefficients, space_invariants_at
from .taylor import linear_ode_jets

__all__ = [
    "POLE_THRESHOLD",
    "CurvatureProfile",
    "Segment",
    "RoundtripReport",
    "ReconstructionResult",
    "NormalizationReport",
    "plane_profile",
    "space_profile",
    "default_frame",
    "random_frame",
    "reconstruct",
    "reconstruct_plane",
    "reconstruct_space",
    "ga_normalize",
    "trace_identity_error",
    "orbit_check",
]

#: profile values above this magnitude are treated as poles
POLE_THRESHOLD = 1e6


def default_frame(dim: int) -> np.ndarray:
    """``x = 0`` and ``x', x'', (x''')`` the standard basis; shape ``(dim + 1, dim)``."""
    return np.vstack([np.zeros(dim), np.eye(dim)])


def random_frame(dim: int, rng: np.random.Generator, cond_max: float = 20.0) -> np.ndarray:
    """A random initial frame with condition number below ``cond_max``."""
    while True:
        F = rng.normal(size=(dim, dim))
        if np.linalg.cond(F) < cond_max:
            return np.vstack([rng.normal(size=dim), F])


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Curvature data for the reconstruction.

    Attributes
    ----------
    kind : str
        ``"plane"`` or ``"space"``.
    k, M : profile
        Curvatures as functions of the general-affine arc length
        (expressions in ``variable``, numbers, samples or jet callables).
        ``M`` is required for space profiles.
    eps : int
        +1 or -1.
    interval : tuple of float
        Integration window.
    initial_frame : ndarray, optional
        Rows ``x, x', x'', (x''')`` at the start of each segment.
    """

    kind: str
    k: Profile
    eps: int
    interval: tuple[float, float]
    M: Profile | None = None
    initial_frame: np.ndarray | None = field(default=None, repr=False)
    variable: str = "t"

    def __post_init__(self):
        if self.kind not in ("plane", "space"):
            raise UsageError(f"profile kind must be 'plane' or 'space', not {self.kind!r}")
        if self.eps not in (1, -1):
            raise UsageError(f"eps must be +1 or -1, got {self.eps!r}")
        lo, hi = map(float, self.interval)
        if not lo < hi:
            raise UsageError("empty reconstruction interval")
        object.__setattr__(self, "interval", (lo, hi))
        object.__setattr__(self, "k", as_profile(self.k))
        if self.kind == "space":
            if self.M is None:
                raise UsageError("space profiles need M")
            object.__setattr__(self, "M", as_profile(self.M))
        frame = default_frame(self.dim) if self.initial_frame is None else np.asarray(self.initial_frame, float)
        if frame.shape != (self.dim + 1, self.dim):
            raise UsageError(f"initial frame must have shape {(self.dim + 1, self.dim)}")
        if abs(np.linalg.det(frame[1:])) < 1e-12:
            raise UsageError("initial frame is degenerate")
        object.__setattr__(self, "initial_frame", frame)

    @property
    def dim(self) -> int:
        return 2 if self.kind == "plane" else 3

    def k_jet(self, t: float, order: int) -> Jet:
        return profile_jet(self.k, t, order, self.variable)

    def M_jet(self, t: float, order: int) -> Jet:
        return profile_jet(self.M, t, order, self.variable)  # type: ignore[arg-type]

    def describe(self) -> dict:
        d = {"kind": self.kind, "k": profile_source(self.k), "eps": self.eps, "interval": list(self.interval)}
        if self.M is not None:
            d["M"] = profile_source(self.M)
        return d


def plane_profile(k, eps: int, interval, initial_frame=None, variable: str = "t") -> CurvatureProfile:
    return CurvatureProfile("plane", k, int(eps), tuple(interval), None, initial_frame, variable)


def space_profile(k, M, eps: int, interval, initial_frame=None, variable: str = "t") -> CurvatureProfile:
    return CurvatureProfile("space", k, int(eps), tuple(interval), M, initial_frame, variable)


# ----------------------------------------------------------------------
# ODE coefficients
def _coefficient_jets(profile: CurvatureProfile, t: float, N: int) -> list[Jet]:
    """``C_0..C_{n-1}`` of ``y^(n) = sum C_i y^(i)`` for ``y = x'`` (order ``N``)."""
    eps = float(profile.eps)
    if profile.kind == "plane":
        k = profile.k_jet(t, N + 1)
        k1 = k.deriv()
        k = k.truncate(min(N, k1.order))
        return [-(eps + 0.5 * k1 + 0.5 * k * k), -1.5 * k]
    k = profile.k_jet(t, N + 2)
    M = profile.M_jet(t, N)
    a, b, c = ga_ode_coefficients(k, M, profile.eps)
    return [c, b, a]


def _rhs_values(profile: CurvatureProfile, t: float) -> tuple[np.ndarray, float]:
    C = _coefficient_jets(profile, t, 0)
    return np.array([c.value for c in C]), profile.k_jet(t, 0).value


# ----------------------------------------------------------------------
# results
@dataclass
class Segment:
    """Solution on one pole-free sub-interval.

    ``derivs[i]`` holds ``x', x'', (x''')`` at ``t[i]`` as rows and
    ``k_integral[i]`` is ``int k ds`` from the segment start.
    """

    t: np.ndarray
    x: np.ndarray
    derivs: np.ndarray
    k_integral: np.ndarray
    dense: object = field(repr=False, default=None)
    nfev: int = 0
    nsteps: int = 0
    truncated_at: float | None = None

    def state_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Position and derivative rows at ``t`` (exact at nodes, dense otherwise)."""
        idx = np.flatnonzero(self.t == t)
        if idx.size:
            i = idx[0]
            return self.x[i], self.derivs[i]
        y = self.dense(t)  # type: ignore[misc]
        dim = self.x.shape[1]
        n = self.derivs.shape[1]
        return y[:dim], y[dim : dim * (n + 1)].reshape(n, dim)


@dataclass
class RoundtripReport:
    """Recomputed invariants against the input profile at check nodes."""

    t: np.ndarray
    k_input: np.ndarray
    k_output: np.ndarray
    eps_output: np.ndarray
    M_input: np.ndarray | None = None
    M_output: np.ndarray | None = None

    @property
    def k_error(self) -> float:
        return float(np.max(np.abs(self.k_output - self.k_input))) if self.t.size else 0.0

    @property
    def k_rel_error(self) -> float:
        """``max |dk| / (1 + |k|)``, the meaningful measure next to poles."""
        if not self.t.size:
            return 0.0
        return float(np.max(np.abs(self.k_output - self.k_input) / (1.0 + np.abs(self.k_input))))

    @property
    def M_error(self) -> float | None:
        if self.M_input is None:
            return None
        return float(np.max(np.abs(self.M_output - self.M_input))) if self.t.size else 0.0

    def eps_ok(self, eps: int) -> bool:
        return bool(np.all(self.eps_output == eps))

    def as_dict(self, eps: int) -> dict:
        return {"points": int(self.t.size), "k_error": self.k_error, "k_rel_error": self.k_rel_error,
                "M_error": self.M_error,
                "eps_ok": self.eps_ok(eps)}


@dataclass
class ReconstructionResult:
    profile: CurvatureProfile
    segments: list[Segment]
    roundtrip: RoundtripReport | None
    rtol: float
    atol: float

    @property
    def t(self) -> np.ndarray:
        return np.concatenate([s.t for s in self.segments])

    @property
    def x(self) -> np.ndarray:
        return np.vstack([s.x for s in self.segments])

    @property
    def stats(self) -> dict:
        return {
            "segments": [[float(s.t[0]), float(s.t[-1])] for s in self.segments],
            "nfev": int(sum(s.nfev for s in self.segments)),
            "steps": int(sum(s.nsteps for s in self.segments)),
            "truncated_at": [s.truncated_at for s in self.segments if s.truncated_at is not None],
            "rtol": self.rtol,
            "atol": self.atol,
        }

    def curve_spec(self, segment: int = 0) -> CurveSpec:
        """The solution on one segment as a jet-evaluated curve."""
        seg = self.segments[segment]
        prof = self.profile
        dim = prof.dim
        n = dim  # ODE order for y = x'

        def fn(t: float, order: int) -> list[Jet]:
            x0, d = seg.state_at(t)
            N = max(order - 1 - n, 0)
            ys = linear_ode_jets(_coefficient_jets(prof, t, N), d)
            return [y.integrate(float(x0[i])) for i, y in enumerate(ys)]

        return from_jets(fn, dim, (float(seg.t[0]), float(seg.t[-1])))


# ----------------------------------------------------------------------
# integration
def _profile_values(profile: CurvatureProfile, t: float) -> float:
    """Largest magnitude among the profile values at ``t`` (``inf`` if not evaluable)."""
    try:
        vals = [profile.k_jet(t, 2).coeffs]
        if profile.M is not None:
            vals.append(profile.M_jet(t, 1).coeffs)
    except (JetError, GACurveError, ZeroDivisionError, OverflowError, ValueError):
        return np.inf
    if not all(np.all(np.isfinite(v)) for v in vals):
        return np.inf
    return float(max(abs(v[0]) for v in vals))


def _pole_windows(profile: CurvatureProfile, ts: np.ndarray, mag: np.ndarray) -> list[tuple[float, float]]:
    """Windows around poles of the profile where its magnitude exceeds the threshold."""
    from scipy import optimize

    def size(t):
        return _profile_values(profile, t)

    def signed(t):
        try:
            v = profile.k_jet(t, 0).value
        except (JetError, GACurveError, ZeroDivisionError, OverflowError):
            return 0.0  # not evaluable: the pole itself
        return 1.0 / v if v != 0 else np.inf

    kv = np.array([profile.k_jet(t, 0).value if np.isfinite(m) else np.nan for t, m in zip(ts, mag)])
    centers = []
    for i in range(ts.size - 1):
        if not (np.isfinite(mag[i]) and np.isfinite(mag[i + 1])):
            continue
        if kv[i] * kv[i + 1] < 0:
            # a sign change is a zero or a pole of k; 1/k vanishes at a pole
            try:
                tp = optimize.brentq(signed, ts[i], ts[i + 1], xtol=1e-15)
            except (ValueError, GACurveError):
                continue
            if size(tp) > POLE_THRESHOLD:
                centers.append(tp)
        elif 0 < i and mag[i] >= mag[i - 1] and mag[i] >= mag[i + 1] and mag[i] > 1e3:
            r = optimize.minimize_scalar(lambda t: 1.0 / size(t), bounds=(ts[i - 1], ts[i + 1]),
                                         method="bounded", options={"xatol": 1e-14})
            if size(r.x) > POLE_THRESHOLD:
                centers.append(float(r.x))
    windows = []
    step = ts[1] - ts[0]
    for tp in centers:
        edges = []
        for direction in (-1.0, 1.0):
            far = tp + direction * step
            near = tp + direction * 1e-15 * max(1.0, abs(tp))
            try:
                e = optimize.brentq(lambda t: size(t) - POLE_THRESHOLD, near, far, xtol=1e-15)
            except (ValueError, GACurveError):
                e = tp + direction * 1e-9
            edges.append(e)
        windows.append((min(edges), max(edges)))
    merged: list[tuple[float, float]] = []
    for w in sorted(windows):
        if merged and w[0] <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], w[1]))
        else:
            merged.append(w)
    return merged


def _segments(profile: CurvatureProfile, probe: int = 2001) -> list[tuple[float, float]]:
    """Sub-intervals free of poles and of points where the profile is not evaluable."""
    lo, hi = profile.interval
    ts = np.linspace(lo, hi, probe)
    mag = np.array([_profile_values(profile, t) for t in ts])
    good = mag <= POLE_THRESHOLD
    runs = []
    i = 0
    while i < ts.size:
        if not good[i]:
            i += 1
            continue
        j = i
        while j + 1 < ts.size and good[j + 1]:
            j += 1
        if j > i:
            runs.append((float(ts[i]) if i > 0 else lo, float(ts[j]) if j < ts.size - 1 else hi))
        i = j + 1
    if not runs:
        raise CurveEvaluationError("the curvature profile is not evaluable anywhere on the interval")
    segs = []
    for a, b in runs:
        cuts = sorted(w for w in _pole_windows(profile, ts, mag) if a < w[0] and w[1] < b)
        for w in cuts:
            segs.append((a, w[0]))
            a = w[1]
        segs.append((a, b))
    return segs


def _integrate(profile: CurvatureProfile, lo: float, hi: float, t_eval: np.ndarray, rtol, atol,
               ends_at_pole: bool = False) -> Segment:
    dim = profile.dim
    n = dim  # number of derivative rows

    def rhs(t, y):
        C, kv = _rhs_values(profile, t)
        d = y[dim : dim * (n + 1)].reshape(n, dim)
        top = C @ d  # sum_i C_i y^(i) with y = x'
        return np.concatenate([d[0], d[1:].ravel(), top, [kv]])

    frame = profile.initial_frame
    y0 = np.concatenate([frame.ravel(), [0.0]])
    try:
        sol = solve_ivp(rhs, (lo, hi), y0, method="RK45", t_eval=t_eval, dense_output=True,
                        rtol=rtol, atol=atol)
    except (JetError, GACurveError) as exc:
        raise IntegrationError(f"profile evaluation failed during integration: {exc}") from exc
    truncated = None
    if not sol.success:
        # growth towards a pole of k can defeat the step control; keep the
        # part computed before the failure when the segment ends at a pole
        if not (ends_at_pole and sol.t.size >= 2):
            raise IntegrationError(f"integration failed on [{lo}, {hi}]: {sol.message}")
        truncated = float(sol.t[-1])
    Y = sol.y.T
    x = Y[:, :dim]
    derivs = Y[:, dim : dim * (n + 1)].reshape(-1, n, dim)
    dets = np.linalg.det(derivs)
    # tiny determinants are numerical collapse next to a pole, not a sign change
    signs = np.sign(dets[np.abs(dets) > 1e-14 * np.max(np.abs(dets))])
    if signs.size and np.any(signs != signs[0]):
        raise IntegrationError("the frame determinant changed sign; the solution degenerated")
    return Segment(sol.t, x, derivs, Y[:, -1], sol.sol, int(sol.nfev), int(sol.t.size), truncated)


def _roundtrip(result: ReconstructionResult, max_points: int) -> RoundtripReport:
    prof = result.profile
    ts, kin, kout, eout, Min, Mout = [], [], [], [], [], []
    for si, seg in enumerate(result.segments):
        spec = result.curve_spec(si)
        idx = np.unique(np.linspace(0, seg.t.size - 1, min(max_points, seg.t.size)).astype(int))
        for i in idx:
            t = float(seg.t[i])
            try:
                if prof.kind == "plane":
                    rec = plane_invariants_at(spec, t, strict=False)
                else:
                    rec = space_invariants_at(spec, t, strict=False)
            except DegenerateCurveError:
                continue  # frame collapsed numerically next to a pole
            if rec.k is None:
                continue
            ts.append(t)
            kin.append(prof.k_jet(t, 0).value)
            kout.append(rec.k)
            eout.append(rec.eps)
            if prof.kind == "space":
                Min.append(prof.M_jet(t, 0).value)
                Mout.append(rec.M)
    rep = RoundtripReport(np.array(ts), np.array(kin), np.array(kout), np.array(eout, dtype=int))
    if prof.kind == "space":
        rep.M_input = np.array(Min)
        rep.M_output = np.array(Mout)
    return rep


def reconstruct(
    profile: CurvatureProfile,
    n: int = 201,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-10,
    roundtrip: bool = True,
    roundtrip_points: int = 41,
) -> ReconstructionResult:
    """Integrate the curvature ODE of ``profile``.

    Parameters
    ----------
    profile : CurvatureProfile
    n : int
        Number of output nodes over the whole interval (distributed over
        the pole-free segments).
    rtol, atol : float
        Integrator tolerances.
    roundtrip : bool
        Recompute the invariants at up to ``roundtrip_points`` nodes per
        segment.

    Raises
    ------
    IntegrationError
        When the integrator fails or the frame degenerates.
    """
    if n < 2:
        raise UsageError("need at least two output points")
    lo, hi = profile.interval
    segs = []
    for a, b in _segments(profile):
        m = max(2, int(round(n * (b - a) / (hi - lo))))
        segs.append(_integrate(profile, a, b, np.linspace(a, b, m), rtol, atol, ends_at_pole=b < hi))
    result = ReconstructionResult(profile, segs, None, rtol, atol)
    if roundtrip:
        result.roundtrip = _roundtrip(result, roundtrip_points)
    return result


def reconstruct_plane(profile: CurvatureProfile, n: int = 201, **kw) -> ReconstructionResult:
    """Plane curve with general-affine curvature ``profile.k`` (see :func:`reconstruct`).

    Examples
    --------
    >>> res = reconstruct_plane(plane_profile("0", 1, (0.0, 3.0)), n=31)
    >>> res.roundtrip.k_error < 1e-9
    True
    """
    if profile.kind != "plane":
        raise UsageError("reconstruct_plane needs a plane profile")
    return reconstruct(profile, n, **kw)


def reconstruct_space(profile: CurvatureProfile, n: int = 201, **kw) -> ReconstructionResult:
    """Space curve with curvatures ``profile.k`` and ``profile.M`` (see :func:`reconstruct`)."""
    if profile.kind != "space":
        raise UsageError("reconstruct_space needs a space profile")
    return reconstruct(profile, n, **kw)


# ----------------------------------------------------------------------
# checks
@dataclass
class NormalizationReport:
    """Affine map ``x -> g x + v`` aligning two reconstructions."""

    g: np.ndarray
    v: np.ndarray
    distance: float
    tolerance: float

    @property
    def congruent(self) -> bool:
        return self.distance <= self.tolerance


def ga_normalize(result: ReconstructionResult, reference: ReconstructionResult,
                 tolerance: float = 1e-6) -> NormalizationReport:
    """Map ``result`` onto ``reference`` by the affine motion matching the initial frames.

    ``g = F_ref F^-1`` with ``F`` the derivative frame at the first node
    and ``v = x_ref - g x``.  The sup distance between the mapped curve
    and the reference over the first segment is reported; a reference
    with different invariants gives a large distance.  The tolerance is
    scaled by the size of the reference curve.

    Raises
    ------
    NormalizationError
        If a frame is not invertible or the curves live in different
        dimensions.
    """
    A = result.segments[0]
    B = reference.segments[0]
    if A.x.shape[1] != B.x.shape[1]:
        raise NormalizationError("reconstructions have different dimensions")
    Fa = A.derivs[0].T
    Fb = B.derivs[0].T
    if abs(np.linalg.det(Fa)) < 1e-14 or abs(np.linalg.det(Fb)) < 1e-14:
        raise NormalizationError("initial frame is not invertible")
    g = Fb @ np.linalg.inv(Fa)
    v = B.x[0] - g @ A.x[0]
    if A.t.shape == B.t.shape and np.array_equal(A.t, B.t):
        xb = B.x
    else:
        t_lo, t_hi = max(A.t[0], B.t[0]), min(A.t[-1], B.t[-1])
        keep = (A.t >= t_lo) & (A.t <= t_hi)
        xb = np.array([B.state_at(t)[0] for t in A.t[keep]])
        A = Segment(A.t[keep], A.x[keep], A.derivs[keep], A.k_integral[keep])
    mapped = A.x @ g.T + v
    dist = float(np.max(np.linalg.norm(mapped - xb, axis=1)))
    scale = max(1.0, float(np.max(np.abs(xb))))
    return NormalizationReport(g, v, dist, tolerance * scale)


def trace_identity_error(result: ReconstructionResult) -> float:
    """Largest deviation of ``log|det frame|`` from ``-(3/2) int k ds`` (plane) or ``-3 int k ds`` (space)."""
    factor = 1.5 if result.profile.kind == "plane" else 3.0
    err = 0.0
    for seg in result.segments:
        ld = np.log(np.abs(np.linalg.det(seg.derivs)))
        dev = (ld - ld[0]) + factor * seg.k_integral
        err = max(err, float(np.max(np.abs(dev))))
    return err


def orbit_check(result: ReconstructionResult, n_verify: int = 10, shift: int | None = None) -> float:
    """Relative residual of ``x(t + h) = g_h x(t) + v_h`` on the output nodes.

    ``g_h, v_h`` are fitted from the frames at the first node and at the
    node ``h`` later; the relation is then verified at ``n_verify`` other
    nodes.  Meaningful for constant profiles, whose curves are orbits of
    one-parameter groups.  The output grid must be uniform.
    """
    seg = result.segments[0]
    m = seg.t.size
    if m < n_verify + 3:
        raise UsageError("too few nodes for an orbit check")
    h = shift if shift is not None else m // 4
    F0 = seg.derivs[0].T
    Fh = seg.derivs[h].T
    g = Fh @ np.linalg.inv(F0)
    v = seg.x[h] - g @ seg.x[0]
    idx = np.unique(np.linspace(1, m - h - 1, n_verify).astype(int))
    res = [np.linalg.norm(seg.x[i + h] - (g @ seg.x[i] + v)) for i in idx]
    scale = max(1.0, float(np.max(np.abs(seg.x))))
    return float(max(res) / scale)
