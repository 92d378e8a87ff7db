"""Extremality residuals.

The oracle for the pointwise left-hand sides is sympy: the same
polynomial differential expressions are built symbolically, differentiated
exactly and evaluated.
"""

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gacurves.curves import builtin
from gacurves.errors import InsufficientOrderError, UsageError
from gacurves.extremal import (
    equiaffine_space_extremal_check,
    ga_plane_general_residual,
    ga_plane_residual,
    ga_space_residuals,
    linear_complex_extremal_check,
    linear_dependence_residual,
    make_grid,
    projective_extremal_residuals,
)
from gacurves.profiles import SampledProfile
from gacurves.reconstruct import plane_profile, reconstruct

_t = sp.Symbol("t")
SQRT2 = math.sqrt(2.0)


def _sym_plane(k, eps):
    d = [sp.diff(k, _t, j) for j in range(4)]
    return d[3] + sp.Rational(3, 2) * d[0] * d[2] + d[1] ** 2 / 2 + d[0] ** 2 * d[1] / 2 + eps * d[1]


def _sym_space(k, M, eps):
    kd = [sp.diff(k, _t, j) for j in range(4)]
    Md = [sp.diff(M, _t, j) for j in range(3)]
    r1 = kd[3] + sp.Rational(3, 2) * kd[0] * kd[2] + kd[1] ** 2 / 2 + kd[0] ** 2 * kd[1] / 2 \
        - sp.Rational(1, 5) * eps * kd[1] + sp.Rational(6, 5) * Md[1]
    r2 = kd[2] + sp.Rational(2, 3) * kd[0] * kd[1] + sp.Rational(5, 6) * eps * kd[1] * Md[0] \
        - sp.Rational(3, 2) * eps * kd[0] * Md[1] - eps * Md[2]
    return r1, r2


_PROFILES = [("sin(2*t) + t^2/3", sp.sin(2 * _t) + _t ** 2 / 3),
             ("exp(-t)*cos(t)", sp.exp(-_t) * sp.cos(_t)),
             ("atan(t) - 0.5", sp.atan(_t) - sp.Rational(1, 2))]


@pytest.mark.parametrize("src,sym", _PROFILES)
@pytest.mark.parametrize("eps", [1, -1])
def test_plane_residual_against_sympy(src, sym, eps):
    grid = np.linspace(-1.0, 1.0, 9)
    rep = ga_plane_residual(src, eps, grid)
    f = sp.lambdify(_t, _sym_plane(sym, eps), "math")
    np.testing.assert_allclose(rep.residuals, [f(t) for t in grid], rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("eps", [1, -1])
def test_space_residuals_against_sympy(eps):
    (ks, k), (Ms, M) = _PROFILES[0], _PROFILES[1]
    grid = np.linspace(-1.0, 1.0, 9)
    r1, r2 = ga_space_residuals(ks, Ms, eps, grid)
    s1, s2 = (sp.lambdify(_t, e, "math") for e in _sym_space(k, M, eps))
    np.testing.assert_allclose(r1.residuals, [s1(t) for t in grid], rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(r2.residuals, [s2(t) for t in grid], rtol=1e-12, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(0, 60))
def test_residuals_are_local(start, length):
    full = np.linspace(-1.0, 1.0, 101)
    sub = full[start : start + length + 1]
    a = ga_plane_residual("sin(2*t) + t^2/3", 1, full)
    b = ga_plane_residual("sin(2*t) + t^2/3", 1, sub)
    np.testing.assert_array_equal(b.residuals, a.residuals[start : start + length + 1])


@pytest.mark.parametrize("k,eps", [(0.0, 1), (-4.0, 1), (-SQRT2, -1), (-8 / math.sqrt(5), -1), (2.5, 1)])
def test_constant_plane_profiles_are_extremal(k, eps):
    rep = ga_plane_residual(repr(k), eps, (0.0, 1.0, 21))
    assert rep.verdict and rep.sup_norm <= 1e-8


@pytest.mark.parametrize("k,M,eps", [(0.0, 0.0, 1), (-SQRT2, SQRT2, -1), (0.7, -1.3, 1)])
def test_constant_space_profiles_are_extremal(k, M, eps):
    r1, r2 = ga_space_residuals(repr(k), repr(M), eps, (0.0, 1.0, 21))
    assert r1.sup_norm <= 1e-8 and r2.sup_norm <= 1e-8


def test_nonconstant_solution_and_perturbation():
    k = "3*sqrt(2)*tanh(sqrt(2)*t)"
    assert ga_plane_residual(k, 1, (-2.0, 2.0, 201)).sup_norm < 1e-9
    assert not ga_plane_residual("3.03*sqrt(2)*tanh(sqrt(2)*t)", 1, (-2.0, 2.0, 201)).verdict


def test_pole_points_are_excluded():
    grid = np.linspace(0.0, 0.4, 5)  # contains 0.2
    rep = ga_plane_residual("sqrt(2) + 3/(t - 0.2)", -1, grid)
    assert rep.excluded == 1 and rep.grid.size == 4


def test_linear_dependence_of_extremals():
    res = reconstruct(plane_profile("3*sqrt(2)*tanh(sqrt(2)*t)", 1, (-1.0, 1.0)), n=101, roundtrip=False)
    assert linear_dependence_residual(res) <= 1e-5
    res = reconstruct(plane_profile("t^2 - 0.5*t^3", 1, (-1.0, 1.0)), n=101, roundtrip=False)
    assert linear_dependence_residual(res) > 1e-3


def test_linear_complex_reduction():
    rep = linear_complex_extremal_check("sin(t) + t^3/4", -1, (-1.0, 1.0, 41))
    assert rep.identity_error < 1e-12
    assert rep.space_2.sup_norm < 1e-12
    rep = linear_complex_extremal_check("3*sqrt(2)*tanh(sqrt(2)*t)", 1, (-2.0, 2.0, 81))
    assert rep.verdict


def test_general_functional():
    # constant k gives G = 0 for any f
    rep = ga_plane_general_residual("1.3", 1, "k^2/2", (0.0, 1.0, 11))
    assert rep.sup_norm == 0.0 and np.all(rep.extra["G"] == 0.0)
    a = ga_plane_general_residual("sin(t)", -1, "1", (0.0, 1.0, 11))
    b = ga_plane_residual("sin(t)", -1, (0.0, 1.0, 11))
    np.testing.assert_allclose(a.residuals, b.residuals, rtol=1e-12, atol=1e-12)


def test_projective_equations():
    assert projective_extremal_residuals("plane", "0.7", (0.0, 1.0, 11)).sup_norm == 0.0
    assert not projective_extremal_residuals("plane", "t^2", (0.0, 1.0, 11)).verdict
    rep = projective_extremal_residuals("space", ("t", "0"), (0.0, 1.0, 11))
    assert not rep.verdict and rep.reduction_consistent
    np.testing.assert_allclose(rep.residual_1.residuals, 16 * rep.residual_1.grid, rtol=1e-14)
    rep = projective_extremal_residuals("space", ("0.4", "-1.1"), (0.0, 1.0, 11))
    assert rep.verdict and rep.constant_curvatures
    with pytest.raises(UsageError):
        projective_extremal_residuals("conic", "0", (0.0, 1.0, 3))


def test_equiaffine_check():
    assert equiaffine_space_extremal_check(builtin("cubic-parabola")).verdict
    rep = equiaffine_space_extremal_check(builtin("circular-helix"))
    assert not rep.verdict and rep.ell_sup == pytest.approx(1.0)


def test_sampled_profile_order_limit():
    t = np.linspace(0, 1, 41)
    prof = SampledProfile(t, np.sin(t))
    # the plane equation needs k''' and is served; the general one needs k^(5)
    rep = ga_plane_residual(prof, 1, (0.2, 0.8, 5))
    exact = ga_plane_residual("sin(t)", 1, (0.2, 0.8, 5))
    np.testing.assert_allclose(rep.residuals, exact.residuals, atol=1e-3)
    with pytest.raises(InsufficientOrderError):
        ga_plane_general_residual(prof, 1, "k^2", (0.2, 0.8, 5))


def test_grid_validation():
    with pytest.raises(UsageError):
        make_grid((1.0, 0.0, 5))
    np.testing.assert_array_equal(make_grid([0.0, 0.5]), [0.0, 0.5])
