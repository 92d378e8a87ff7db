"""Abel-equation route to graphs of prescribed curvature."""

import math

import numpy as np
import pytest
import sympy as sp

from gacurves.abel import AbelProblem, abel_rhs, abel_solve, closed_form_a, closed_form_s, mu_equation_residual
from gacurves.curves import eval_curve
from gacurves.errors import AbelSingularityError, DomainError, UsageError
from gacurves.plane import plane_invariants_at

SQRT2 = math.sqrt(2.0)


@pytest.mark.parametrize("mu,k,eps,grid", [
    ("1 - t^2", "0", 1, (-0.9, 0.9, 19)),      # ellipse graph -sqrt(1 - t^2)
    ("1 + t^2", "0", -1, (-2.0, 2.0, 21)),     # hyperbola graph sqrt(1 + t^2)
    ("exp(-2*t/3)", -SQRT2, -1, (-1.0, 1.0, 21)),  # exponential graph
    ("t^(2/3)", "-4", 1, (0.5, 2.0, 16)),     # t log t
    ("1", "3.7", 1, (0.0, 1.0, 5)),           # the parabola: both sides vanish
])
def test_mu_residual_examples(mu, k, eps, grid):
    rep = mu_equation_residual(mu, k, eps, grid)
    assert rep.sup_norm < 1e-13


def test_mu_residual_against_sympy():
    t = sp.Symbol("t")
    mu = 1 + t ** 2 / 3 + sp.sin(t) / 5
    k = sp.cos(t)
    expr = mu * sp.diff(mu, t, 3) ** 2 + (k ** 2 / 2) * sp.diff(mu, t, 2) ** 3
    f = sp.lambdify(t, expr, "math")
    grid = np.linspace(-1.0, 1.0, 11)
    rep = mu_equation_residual("1 + t^2/3 + sin(t)/5", "cos(t)", 1, grid)
    np.testing.assert_allclose(rep.residuals, [f(x) for x in grid], rtol=1e-12, atol=1e-14)
    with pytest.raises(DomainError):
        mu_equation_residual("t", "0", 1, (-1.0, 1.0, 3))


def test_closed_form_constant():
    assert closed_form_a(-4.0, 1) == pytest.approx(1.0)  # (4 + 0) / 4
    with pytest.raises(DomainError):
        closed_form_a(1.0, 1)
    x = np.linspace(1.0, 2.0, 7)
    s1 = closed_form_s(-5.0, 1, x)
    rhs = abel_rhs(AbelProblem(k=-5.0, eps=1))
    # s = a / sqrt(2x) has s' = -s / (2x); the right-hand side must agree
    assert np.allclose([rhs(xi, si) for xi, si in zip(x, s1)], -0.5 * s1 / x, rtol=1e-12)
    np.testing.assert_allclose(closed_form_s(-5.0, 1, x, reduction="second"), -1.0 / s1)


@pytest.mark.parametrize("k,eps", [(-5.0, 1), (-SQRT2, -1), (-1.0, -1)])
@pytest.mark.parametrize("branch", [1, -1])
def test_numeric_matches_closed_form(k, eps, branch):
    a = closed_form_a(k, eps, branch)
    s0 = a / SQRT2
    res = abel_solve(AbelProblem(k=k, eps=eps, x0=1.0, s0=s0, x1=2.0, n=41))
    assert res.closed_form_error(branch=branch) < 1e-9
    assert res.roundtrip.k_error < 1e-6 and res.roundtrip.eps_ok(eps)


@pytest.mark.parametrize("eps,s0", [(1, 0.7), (-1, 1.3), (-1, -0.6)])
def test_reductions_give_the_same_graph(eps, s0):
    k = "-4.5 + 0.3*x" if eps == 1 else "-1 - 0.2*x"
    first = abel_solve(AbelProblem(k=k, eps=eps, reduction="first", x0=1.0, s0=s0, x1=1.4, n=31))
    second = abel_solve(AbelProblem(k=k, eps=eps, reduction="second", x0=1.0, s0=-eps / s0, x1=1.4, n=31))
    np.testing.assert_allclose(second.s, -eps / first.s, rtol=1e-8)
    np.testing.assert_allclose(second.w, first.w, rtol=1e-8)
    np.testing.assert_allclose(second.t, first.t, rtol=1e-8, atol=1e-12)
    np.testing.assert_allclose(second.f, first.f, rtol=1e-8, atol=1e-12)


def test_graph_has_prescribed_curvature():
    res = abel_solve(AbelProblem(k="-4.5 + 0.3*x", eps=1, x0=1.0, s0=0.8, x1=1.6, n=61))
    assert res.roundtrip.k_error < 1e-6
    assert res.roundtrip.mu_residual_sup < 1e-6
    i = 30
    r = plane_invariants_at(res.graph_at_node(i), float(res.t[i]))
    assert r.k == pytest.approx(-4.5 + 0.3 * res.x[i], abs=1e-6)
    # independent check on the sampled graph: f'' = mu^(-3/2)
    spec = res.graph_spec(201)
    for i in (15, 30, 45):
        fpp = eval_curve(spec, float(res.t[i]), 2)[1].derivative(2)
        assert fpp == pytest.approx(res.x[i] ** -1.5, rel=1e-5)


def test_opposite_sigma_reflects_curvature():
    base = dict(k=-5.0, eps=1, x0=1.0, s0=closed_form_a(-5.0, 1) / SQRT2, x1=1.5, n=21)
    plus = abel_solve(AbelProblem(**base))
    minus = abel_solve(AbelProblem(**base, sigma=-plus.sigma), roundtrip=False)
    r = plane_invariants_at(minus.graph_at_node(10), float(minus.t[10]))
    assert r.k == pytest.approx(5.0, abs=1e-6)


def test_singularity_reports_abscissa():
    # k = 0, eps = 1: s = 1/sqrt(3 - 2x) blows up at x = 3/2
    with pytest.raises(AbelSingularityError) as info:
        abel_solve(AbelProblem(k=0.0, eps=1, x0=1.0, s0=1.0, x1=30.0))
    assert info.value.x == pytest.approx(1.5, abs=1e-3)


def test_problem_validation():
    with pytest.raises(UsageError):
        AbelProblem(k=0.0, eps=0)
    with pytest.raises(UsageError):
        AbelProblem(k=0.0, eps=1, x0=-1.0)
    with pytest.raises(UsageError):
        AbelProblem(k=0.0, eps=1, s0=0.0)
    with pytest.raises(UsageError):
        AbelProblem(k=0.0, eps=1, reduction="third")
