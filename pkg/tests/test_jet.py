"""Jet arithmetic: worked examples, ring laws and oracles.

The elementary-function oracle is sympy's series expansion; the chain
rule oracle is a central finite difference of the scalar evaluation.
"""

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gacurves import jet as J
from gacurves.errors import DomainError, InsufficientOrderError, InvalidOrderError, SingularPointError
from gacurves.expr import parse_expression
from gacurves.jet import Jet, derivative, jet_arith, jet_constant, jet_elem, jet_variable


def test_jet_variable_examples():
    assert jet_variable(2.0, 3).coeffs.tolist() == [2.0, 1.0, 0.0, 0.0]
    assert jet_variable(0.0, 1).coeffs.tolist() == [0.0, 1.0]
    assert jet_variable(-1.5, 5).coeffs.tolist() == [-1.5, 1, 0, 0, 0, 0]


def test_jet_variable_rejects_order_zero():
    with pytest.raises(InvalidOrderError):
        jet_variable(1.0, 0)


def test_arith_examples():
    a = Jet([1, 1, 0])
    np.testing.assert_allclose(jet_arith("mul", a, a).coeffs, [1, 2, 1])
    np.testing.assert_allclose(jet_arith("div", Jet([1, 0, 0]), a).coeffs, [1, -1, 1])
    np.testing.assert_allclose(jet_arith("pow_real", Jet([4, 1, 0, 0]), 0.5).coeffs,
                               [2, 0.25, -0.015625, 0.001953125], rtol=1e-15)


def test_arith_errors():
    with pytest.raises(SingularPointError):
        Jet([1.0, 1.0]) / Jet([0.0, 1.0])
    with pytest.raises(DomainError):
        jet_arith("pow_real", Jet([-1.0, 1.0]), 0.5)
    with pytest.raises(DomainError):
        jet_arith("pow_int", Jet([1.0, 1.0]), 0.5)


def test_elem_examples():
    np.testing.assert_allclose(jet_elem("exp", Jet([0, 1, 0, 0])).coeffs, [1, 1, 0.5, 1 / 6])
    np.testing.assert_allclose(jet_elem("cos", Jet([0, 1, 0])).coeffs, [1, 0, -0.5])
    np.testing.assert_allclose(jet_elem("tanh", Jet([0, 1, 0, 0, 0])).coeffs, [0, 1, 0, -1 / 3, 0], atol=1e-16)


@pytest.mark.parametrize("fn,x0", [("log", 0.0), ("sqrt", -1.0), ("tan", math.pi / 2), ("log", -2.0)])
def test_elem_domain_errors(fn, x0):
    with pytest.raises(DomainError) as info:
        jet_elem(fn, jet_variable(x0, 3))
    assert fn in str(info.value)


def test_derivative_examples():
    assert derivative(Jet([1, 2, 3]), 2) == 6
    assert derivative(Jet([5, 0, 0]), 0) == 5
    assert derivative(jet_elem("exp", jet_variable(0.0, 5)), 4) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(InsufficientOrderError):
        derivative(Jet([1, 2]), 2)


_T = sp.Symbol("t")
_SYMPY = {"exp": sp.exp, "log": sp.log, "sin": sp.sin, "cos": sp.cos, "sinh": sp.sinh, "cosh": sp.cosh,
          "tan": sp.tan, "tanh": sp.tanh, "sqrt": sp.sqrt, "atan": sp.atan}


@pytest.mark.parametrize("fn", sorted(_SYMPY))
@pytest.mark.parametrize("x0", [0.3, 1.1])
def test_elem_against_sympy_series(fn, x0):
    # inner function u(t) = x0 + t + t^2/3 exercises the composition recurrences
    order = 7
    u = Jet([x0, 1.0, 1.0 / 3.0] + [0.0] * (order - 2))
    got = jet_elem(fn, u).coeffs
    series = sp.series(_SYMPY[fn](sp.Float(x0, 30) + _T + _T ** 2 / 3), _T, 0, order + 1).removeO()
    ref = [float(series.coeff(_T, j)) for j in range(order + 1)]
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-13)


def _coeffs(n):
    return st.lists(st.floats(-2.0, 2.0, allow_nan=False), min_size=n, max_size=n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(_coeffs(n + 1), _coeffs(n + 1), _coeffs(n + 1))))
def test_ring_axioms(data):
    a, b, c = (Jet(x) for x in data)

    def close(x, y):
        scale = 1.0 + np.max(np.abs(x.coeffs)) + np.max(np.abs(y.coeffs))
        np.testing.assert_allclose(x.coeffs, y.coeffs, rtol=0, atol=1e-12 * scale * 10)

    close(a * b, b * a)
    close((a * b) * c, a * (b * c))
    close(a * (b + c), a * b + a * c)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(_coeffs(n + 1), _coeffs(n + 1))),
       st.floats(0.5, 2.0))
def test_div_inverts_mul(data, b0):
    a = Jet(data[0])
    bc = list(data[1])
    bc[0] = b0
    b = Jet(bc)
    q = (a * b) / b
    np.testing.assert_allclose(q.coeffs, a.coeffs, rtol=1e-12, atol=1e-10)


_COMPOSITES = ["sin(exp(t)) * t^2", "sqrt(1 + t^2) / cosh(t)", "atan(t^3 - t) + log(2 + sin(t))",
               "tanh(t) * exp(-t^2)", "tan(t/2) + t^(5/2)"]


@pytest.mark.parametrize("src", _COMPOSITES)
@settings(max_examples=15, deadline=None)
@given(t0=st.floats(0.2, 1.2))
def test_chain_rule_against_finite_differences(src, t0):
    e = parse_expression(src)
    jt = e.evaluate({"t": jet_variable(t0, 4)})
    f = lambda t: float(e.evaluate({"t": t}))
    h = 1e-3
    v = {j: f(t0 + j * h) for j in range(-3, 4)}
    # fourth-order central stencils
    fd = [
        (-v[2] + 8 * v[1] - 8 * v[-1] + v[-2]) / (12 * h),
        (-v[2] + 16 * v[1] - 30 * v[0] + 16 * v[-1] - v[-2]) / (12 * h ** 2),
        (-v[3] + 8 * v[2] - 13 * v[1] + 13 * v[-1] - 8 * v[-2] + v[-3]) / (8 * h ** 3),
    ]
    for k, approx in enumerate(fd, start=1):
        exact = jt.derivative(k)
        assert abs(exact - approx) <= 1e-5 * max(1.0, abs(exact))


def test_truncate_deriv_integrate():
    j = jet_elem("exp", jet_variable(0.0, 5))
    assert j.deriv().order == 4
    np.testing.assert_allclose(j.deriv().coeffs, j.truncate(4).coeffs)
    np.testing.assert_allclose(j.deriv().integrate(1.0).coeffs, j.coeffs)
    with pytest.raises(InsufficientOrderError):
        j.truncate(9)


def test_constant_and_module_aliases():
    c = jet_constant(3.0, 4)
    assert c.coeffs.tolist() == [3.0, 0, 0, 0, 0]
    assert J.exp(0.0) == pytest.approx(1.0)
    np.testing.assert_allclose(J.sin(jet_variable(0.0, 3)).coeffs, [0, 1, 0, -1 / 6])
