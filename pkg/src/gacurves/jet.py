"""Truncated Taylor series ("jets") of scalar functions at a point.

A :class:`Jet` of order ``N`` stores the normalized coefficients
``c_j = f^(j)(t0) / j!`` for ``j = 0..N``.  Arithmetic follows the
Cauchy-product rules of truncated power series and the elementary
functions use the classical first-order recurrences, so derivatives of
arbitrary composite expressions come out exact up to rounding.

Examples
--------
>>> t = jet_variable(0.0, 4)
>>> exp(t).coeffs.tolist()
[1.0, 1.0, 0.5, 0.16666666666666666, 0.041666666666666664]
>>> derivative(exp(t), 4)
1.0

Binary operations between jets of different orders silently truncate to
the smaller order, which is the order up to which both operands are
known.  This is what makes expressions such as ``a.deriv() * b``
convenient to write.
"""

from __future__ import annotations

import math
from numbers import Real
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, InsufficientOrderError, InvalidOrderError, SingularPointError

__all__ = [
    "DEFAULT_ORDER",
    "Jet",
    "jet_variable",
    "jet_constant",
    "jet_arith",
    "jet_elem",
    "pow_int",
    "pow_real",
    "derivative",
    "ELEMENTARY",
    "exp",
    "log",
    "sin",
    "cos",
    "sinh",
    "cosh",
    "tan",
    "tanh",
    "sqrt",
    "atan",
    "det2",
    "det3",
    "solve_linear",
]

#: default truncation order used throughout the library
DEFAULT_ORDER = 8

Scalar = Union[float, int]


class Jet:
    """Truncated Taylor series of a scalar function.

    Parameters
    ----------
    coeffs : sequence of float
        Normalized Taylor coefficients ``c_0..c_N``.

    Notes
    -----
    Instances are immutable by convention: no method modifies ``coeffs``
    in place, so jets can be shared freely.
    """

    __slots__ = ("_c",)
    __array_priority__ = 100  # make ``ndarray * Jet`` defer to Jet

    def __init__(self, coeffs: Sequence[float]):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise InvalidOrderError("a jet needs at least one coefficient")
        self._c = c

    # ------------------------------------------------------------------
    # basic accessors
    @property
    def coeffs(self) -> np.ndarray:
        return self._c.copy()

    @property
    def order(self) -> int:
        return self._c.size - 1

    @property
    def value(self) -> float:
        return float(self._c[0])

    def __len__(self) -> int:
        return self._c.size

    def __getitem__(self, j: int) -> float:
        return float(self._c[j])

    def __repr__(self) -> str:
        return f"Jet({self._c.tolist()!r})"

    def derivative(self, k: int) -> float:
        """Return the ``k``-th derivative ``k! * c_k``."""
        return derivative(self, k)

    def derivatives(self) -> np.ndarray:
        """All derivatives ``f(t0), f'(t0), ..., f^(N)(t0)``."""
        fact = np.cumprod(np.r_[1.0, np.arange(1, self._c.size)])
        return self._c * fact

    def truncate(self, order: int) -> "Jet":
        if order < 0:
            raise InvalidOrderError(f"invalid order {order}")
        if order > self.order:
            raise InsufficientOrderError(f"cannot extend a jet of order {self.order} to {order}")
        return Jet(self._c[: order + 1])

    def deriv(self) -> "Jet":
        """Jet of the derivative function (one order lower)."""
        if self.order < 1:
            raise InsufficientOrderError("cannot differentiate a jet of order 0")
        n = np.arange(1, self._c.size)
        return Jet(self._c[1:] * n)

    def integrate(self, c0: float = 0.0) -> "Jet":
        """Jet of the antiderivative with constant term ``c0`` (one order higher)."""
        n = np.arange(1, self._c.size + 1)
        return Jet(np.r_[c0, self._c / n])

    def __call__(self, h):
        """Evaluate the truncated polynomial at offset ``h`` from ``t0``."""
        return np.polyval(self._c[::-1], h)

    def compose(self, inner: "Jet") -> "Jet":
        """Compose the series ``self`` (taken around ``inner.value``) with ``inner``.

        ``self`` holds the Taylor coefficients of an outer function ``g``
        around ``u0 = inner.value``; the result is the jet of ``g(inner)``
        truncated at ``min(self.order, inner.order)``.
        """
        n = min(self.order, inner.order)
        d = inner.truncate(n)._c.copy()
        d[0] = 0.0
        out = np.zeros(n + 1)
        # Horner scheme in the ring of truncated series
        for cj in self._c[n::-1]:
            out = _mul_arrays(out, d, n)
            out[0] += cj
        return Jet(out)

    # ------------------------------------------------------------------
    # arithmetic
    def _coerce(self, other) -> "tuple[np.ndarray, np.ndarray]":
        if isinstance(other, Jet):
            n = min(self.order, other.order)
            return self._c[: n + 1], other._c[: n + 1]
        if isinstance(other, (Real, np.floating, np.integer)):
            o = np.zeros_like(self._c)
            o[0] = float(other)
            return self._c, o
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            c = self._c.copy()
            c[0] += float(other)
            return Jet(c)
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return Jet(pair[0] + pair[1])

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self._c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            return Jet(self._c * float(other))
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return Jet(_mul_arrays(a, b, a.size - 1))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            if float(other) == 0.0:
                raise SingularPointError("division by zero")
            return Jet(self._c / float(other))
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return Jet(_div_arrays(*pair))

    def __rtruediv__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            num = np.zeros_like(self._c)
            num[0] = float(other)
            return Jet(_div_arrays(num, self._c))
        return NotImplemented

    def __pow__(self, other):
        if isinstance(other, Jet):
            return exp(other * log(self))
        if isinstance(other, (Real, np.floating, np.integer)):
            e = float(other)
            if e.is_integer() and abs(e) < 2**31:
                return pow_int(self, int(e))
            return pow_real(self, e)
        return NotImplemented

    def __rpow__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            base = float(other)
            if base <= 0.0:
                raise DomainError("pow", base, "non-positive base with variable exponent")
            return exp(self * math.log(base))
        return NotImplemented

    # comparisons are deliberately not defined: a jet is not an ordered object


# ----------------------------------------------------------------------
# array kernels
def _mul_arrays(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a[: n + 1], b[: n + 1])[: n + 1]


def _div_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    b0 = float(b[0])
    if b0 == 0.0:
        raise SingularPointError("division by a series with zero constant term")
    n = a.size
    q = np.zeros(n)
    for k in range(n):
        q[k] = (a[k] - np.dot(b[1 : k + 1], q[k - 1 :: -1][:k] if k else q[:0])) / b0
    return q


def jet_variable(t0: float, order: int = DEFAULT_ORDER) -> Jet:
    """Jet of the identity function at ``t0``.

    >>> jet_variable(2.0, 3).coeffs.tolist()
    [2.0, 1.0, 0.0, 0.0]
    """
    if int(order) != order or order < 1:
        raise InvalidOrderError(f"jet_variable needs order >= 1, got {order}")
    c = np.zeros(int(order) + 1)
    c[0] = float(t0)
    c[1] = 1.0
    return Jet(c)


def jet_constant(value: float, order: int = DEFAULT_ORDER) -> Jet:
    if int(order) != order or order < 0:
        raise InvalidOrderError(f"invalid order {order}")
    c = np.zeros(int(order) + 1)
    c[0] = float(value)
    return Jet(c)


def derivative(j: Jet, k: int) -> float:
    """Return ``k! * c_k``, the ``k``-th derivative at the expansion point."""
    if k < 0:
        raise InvalidOrderError(f"negative derivative order {k}")
    if k > j.order:
        raise InsufficientOrderError(f"derivative of order {k} requested from a jet of order {j.order}")
    return float(math.factorial(k) * j[k])


def pow_int(x: Jet, n: int) -> Jet:
    """Integer power by repeated squaring (negative bases allowed)."""
    if n < 0:
        return 1.0 / pow_int(x, -n)
    result = jet_constant(1.0, x.order)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def pow_real(x: Jet, alpha: float) -> Jet:
    """Real power ``x**alpha`` for a series with positive constant term."""
    c = x._c
    u0 = float(c[0])
    if not u0 > 0.0:
        raise DomainError("pow", u0, f"real exponent {alpha!r} needs a positive base")
    n = c.size
    w = np.zeros(n)
    w[0] = u0**alpha
    for m in range(1, n):
        k = np.arange(1, m + 1)
        w[m] = np.dot((alpha * k - (m - k)) * c[1 : m + 1], w[m - 1 :: -1][:m]) / (m * u0)
    return Jet(w)


def jet_arith(op: str, lhs: Jet, rhs) -> Jet:
    """Dispatch one of ``add, sub, mul, div, pow_int, pow_real``."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    if op == "pow_int":
        if float(rhs) != int(rhs):
            raise DomainError("pow_int", lhs.value, f"exponent {rhs!r} is not an integer")
        return pow_int(lhs, int(rhs))
    if op == "pow_real":
        return pow_real(lhs, float(rhs))
    raise ValueError(f"unknown jet operation {op!r}")


# ----------------------------------------------------------------------
# elementary functions
def _first_order_pair(c: np.ndarray, f0: float, g0: float, sign: float):
    """Joint recurrence for (f, g) with f' = g u', g' = sign * f u'."""
    n = c.size
    f = np.zeros(n)
    g = np.zeros(n)
    f[0], g[0] = f0, g0
    for m in range(1, n):
        k = np.arange(1, m + 1)
        ku = k * c[1 : m + 1]
        f[m] = np.dot(ku, g[m - 1 :: -1][:m]) / m
        g[m] = sign * np.dot(ku, f[m - 1 :: -1][:m]) / m
    return f, g


def _exp(x: Jet) -> Jet:
    c = x._c
    n = c.size
    w = np.zeros(n)
    w[0] = math.exp(c[0])
    for m in range(1, n):
        k = np.arange(1, m + 1)
        w[m] = np.dot(k * c[1 : m + 1], w[m - 1 :: -1][:m]) / m
    return Jet(w)


def _log(x: Jet) -> Jet:
    c = x._c
    u0 = float(c[0])
    if not u0 > 0.0:
        raise DomainError("log", u0)
    n = c.size
    w = np.zeros(n)
    w[0] = math.log(u0)
    for m in range(1, n):
        k = np.arange(1, m)
        w[m] = (c[m] - np.dot(k * w[1:m], c[m - 1 : 0 : -1]) / m) / u0
    return Jet(w)


def _sin_cos(x: Jet):
    c0 = float(x._c[0])
    s, co = _first_order_pair(x._c, math.sin(c0), math.cos(c0), -1.0)
    return Jet(s), Jet(co)


def _sinh_cosh(x: Jet):
    c0 = float(x._c[0])
    s, co = _first_order_pair(x._c, math.sinh(c0), math.cosh(c0), 1.0)
    return Jet(s), Jet(co)


def _tan(x: Jet) -> Jet:
    c0 = float(x._c[0])
    if abs(math.cos(c0)) < 1e-15:
        raise DomainError("tan", c0, "cos vanishes")
    s, co = _sin_cos(x)
    return s / co


def _tanh(x: Jet) -> Jet:
    s, co = _sinh_cosh(x)
    return s / co


def _sqrt(x: Jet) -> Jet:
    u0 = float(x._c[0])
    if not u0 > 0.0:
        raise DomainError("sqrt", u0)
    return pow_real(x, 0.5)


def _atan(x: Jet) -> Jet:
    if x.order == 0:
        return Jet([math.atan(x.value)])
    d = x.deriv() / (1.0 + x * x)
    return d.integrate(math.atan(x.value))


def _scalar_domain(fn: str, f: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(v: float) -> float:
        v = float(v)
        if fn in ("log", "sqrt") and not (v > 0.0 or (fn == "sqrt" and v == 0.0)):
            raise DomainError(fn, v)
        if fn == "tan" and abs(math.cos(v)) < 1e-15:
            raise DomainError(fn, v, "cos vanishes")
        try:
            return f(v)
        except OverflowError as exc:
            raise DomainError(fn, v, "overflow") from exc

    return wrapped


_JET_IMPL: dict[str, Callable[[Jet], Jet]] = {
    "exp": _exp,
    "log": _log,
    "sin": lambda x: _sin_cos(x)[0],
    "cos": lambda x: _sin_cos(x)[1],
    "sinh": lambda x: _sinh_cosh(x)[0],
    "cosh": lambda x: _sinh_cosh(x)[1],
    "tan": _tan,
    "tanh": _tanh,
    "sqrt": _sqrt,
    "atan": _atan,
}

_SCALAR_IMPL: dict[str, Callable[[float], float]] = {
    name: _scalar_domain(name, getattr(math, name)) for name in _JET_IMPL
}

#: names of the supported elementary functions
ELEMENTARY = frozenset(_JET_IMPL)


def jet_elem(fn: str, x):
    """Apply the elementary function ``fn`` to a jet or a plain number."""
    try:
        if isinstance(x, Jet):
            impl = _JET_IMPL[fn]
        else:
            impl = _SCALAR_IMPL[fn]
    except KeyError:
        raise ValueError(f"unsupported function {fn!r}") from None
    return impl(x)


def _make(fn: str):
    def f(x):
        return jet_elem(fn, x)

    f.__name__ = fn
    f.__doc__ = f"Elementary function ``{fn}`` on jets or numbers."
    return f


exp = _make("exp")
log = _make("log")
sin = _make("sin")
cos = _make("cos")
sinh = _make("sinh")
cosh = _make("cosh")
tan = _make("tan")
tanh = _make("tanh")
sqrt = _make("sqrt")
atan = _make("atan")


# ----------------------------------------------------------------------
# small linear algebra in the jet ring
def det2(u: Sequence, v: Sequence):
    """Determinant of the 2x2 matrix with columns ``u`` and ``v``."""
    return u[0] * v[1] - u[1] * v[0]


def det3(u: Sequence, v: Sequence, w: Sequence):
    """Determinant of the 3x3 matrix with columns ``u``, ``v``, ``w``."""
    return (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )


def solve_linear(columns: Sequence[Sequence], rhs: Sequence):
    """Solve ``sum_i coef_i * columns[i] = rhs`` by Cramer's rule.

    Works for 2 or 3 unknowns with entries that are jets or floats, so
    that the coefficients carry their own derivatives.

    Returns
    -------
    coefs : list
        The solution, one entry per column.
    det : Jet or float
        The determinant of the system.
    """
    n = len(columns)
    if n == 2:
        d = det2(*columns)
        out = []
        for i in range(2):
            cols = list(columns)
            cols[i] = rhs
            out.append(det2(*cols) / d)
        return out, d
    if n == 3:
        d = det3(*columns)
        out = []
        for i in range(3):
            cols = list(columns)
            cols[i] = rhs
            out.append(det3(*cols) / d)
        return out, d
    raise ValueError("solve_linear supports 2 or 3 unknowns")
