"""Curvature profiles: scalar functions of one variable given as data.

A profile is whatever the user hands in for ``k(t)``, ``M(t)`` or
``k(x)``: an expression source, an :class:`~gacurves.expr.Expr`, a
number, a callable returning jets, or samples on a grid.  The function
:func:`profile_jet` turns any of them into a jet at a point, so residuals
and ODE right-hand sides get exact derivatives whenever the profile is
analytic.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real
from typing import Callable, Mapping, Sequence, Union

import numpy as np
from scipy import interpolate

from .errors import UsageError
from .expr import Expr, parse_expression
from .jet import Jet, jet_constant, jet_variable

__all__ = ["SampledProfile", "Profile", "as_profile", "profile_jet", "profile_value", "profile_source"]


@dataclass(frozen=True, eq=False)
class SampledProfile:
    """Profile known on a grid, interpolated by a quintic spline.

    Derivatives beyond the fourth are not served, matching the sampled
    curve path; the claimed accuracy of anything built on samples is
    therefore limited (about 1e-4 for roundtrips).
    """

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.t.size != self.values.size or self.t.size < 9:
            raise UsageError("sampled profiles need matching arrays with at least 9 points")
        if np.any(np.diff(self.t) <= 0):
            raise UsageError("sampled profile grid must be increasing")
        object.__setattr__(self, "_spline", interpolate.make_interp_spline(self.t, self.values, k=5))

    max_order = 4

    def jet(self, t: float, order: int) -> Jet:
        n = min(order, self.max_order)
        spl = self._spline  # type: ignore[attr-defined]
        c = [float(spl(t, nu=j)) for j in range(n + 1)]
        fact = np.cumprod(np.r_[1.0, np.arange(1, n + 1)])
        return Jet(np.asarray(c) / fact)


JetCallable = Callable[[float, int], Jet]
Profile = Union[Expr, float, SampledProfile, JetCallable]


def as_profile(value: "Profile | str | tuple") -> Profile:
    """Normalize user input into a profile object.

    Strings are parsed as expressions; a pair ``(t, values)`` of arrays
    becomes a :class:`SampledProfile`.
    """
    if isinstance(value, str):
        return parse_expression(value)
    if isinstance(value, (Expr, SampledProfile)) or callable(value):
        return value
    if isinstance(value, (Real, np.floating, np.integer)):
        return float(value)
    if isinstance(value, tuple) and len(value) == 2:
        return SampledProfile(np.asarray(value[0], dtype=float), np.asarray(value[1], dtype=float))
    raise UsageError(f"cannot interpret {value!r} as a profile")


def profile_jet(
    profile: Profile,
    t: float,
    order: int,
    variable: str = "t",
    params: Mapping[str, float] | None = None,
) -> Jet:
    """Jet of ``profile`` at ``t`` with the requested order (if available)."""
    if isinstance(profile, (Real, np.floating, np.integer)):
        return jet_constant(float(profile), order)
    if isinstance(profile, Expr):
        env = dict(params or {})
        env[variable] = jet_variable(float(t), max(order, 1))
        v = profile.evaluate(env)
        if not isinstance(v, Jet):
            return jet_constant(float(v), order)
        return v.truncate(order)
    if isinstance(profile, SampledProfile):
        return profile.jet(float(t), order)
    if callable(profile):
        return profile(float(t), order)
    raise UsageError(f"cannot evaluate profile {profile!r}")


def profile_value(profile: Profile, t: float, variable: str = "t", params=None) -> float:
    return profile_jet(profile, t, 1, variable, params).value


def profile_max_order(profile: Profile) -> int | None:
    if isinstance(profile, SampledProfile):
        return profile.max_order
    return None


def profile_source(profile: Profile) -> str:
    """Human-readable form used in reports."""
    if isinstance(profile, SampledProfile):
        return f"samples[{profile.t.size}]"
    if isinstance(profile, (Expr, Real, np.floating, np.integer)):
        return str(profile)
    return getattr(profile, "__name__", "callable")


def sample_grid(interval: Sequence[float], n: int) -> np.ndarray:
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi or n < 2:
        raise UsageError("grid needs t_min < t_max and n >= 2")
    return np.linspace(lo, hi, int(n))
