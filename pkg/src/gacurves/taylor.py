"""Taylor-series solutions of ODEs in the jet ring.

These helpers turn an ODE plus initial data at a point into jets of the
solution at that point, without any step-size error:

* :func:`linear_ode_jets` for ``y^(n) = sum_i C_i(t) y^(i)`` with jet
  coefficients ``C_i`` (vector-valued ``y``);
* :func:`picard_jet` for a scalar first-order equation ``s' = F(x, s)``;
* :func:`revert_series` for the inverse function of a jet.

They are used to evaluate invariants of numerically integrated curves
exactly at the integrator's nodes, since a dense-output interpolant does
not carry trustworthy fifth derivatives.
"""

from __future__ import annotations

from math import factorial
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientOrderError, SingularPointError
from .jet import Jet, jet_variable

__all__ = ["linear_ode_jets", "picard_jet", "revert_series"]


def linear_ode_jets(coeffs: Sequence[Jet], initial: np.ndarray) -> list[Jet]:
    """Jets of the solution of a linear ODE of order ``n``.

    Parameters
    ----------
    coeffs : sequence of Jet
        ``C_0, ..., C_{n-1}`` at the expansion point, all of order ``N``
        (the smallest order is used).
    initial : ndarray, shape (n, dim)
        ``y, y', ..., y^(n-1)`` at the expansion point.

    Returns
    -------
    list of Jet
        One jet of order ``N + n`` per component of ``y``.

    Notes
    -----
    With normalized coefficients ``Y_j`` of ``y`` and
    ``F(m, i) = (m + i)! / m!``, the coefficient of ``h^m`` in the
    equation reads
    ``F(m, n) Y_{m+n} = sum_i sum_{l <= m} C_i[l] F(m - l, i) Y_{m-l+i}``.
    """
    init = np.atleast_2d(np.asarray(initial, dtype=float))
    n = len(coeffs)
    if init.shape[0] != n:
        raise ValueError(f"need {n} initial derivatives, got {init.shape[0]}")
    N = min(c.order for c in coeffs)
    C = np.array([c.coeffs[: N + 1] for c in coeffs])  # (n, N+1)
    Y = np.zeros((N + n + 1, init.shape[1]))
    for j in range(n):
        Y[j] = init[j] / factorial(j)

    def F(m: int, i: int) -> float:
        out = 1.0
        for q in range(m + 1, m + i + 1):
            out *= q
        return out

    for m in range(N + 1):
        acc = np.zeros(init.shape[1])
        for i in range(n):
            for l in range(m + 1):
                acc += C[i, l] * F(m - l, i) * Y[m - l + i]
        Y[m + n] = acc / F(m, n)
    return [Jet(Y[:, d]) for d in range(init.shape[1])]


def picard_jet(F: Callable[[Jet, Jet], Jet], x0: float, s0: float, order: int) -> Jet:
    """Jet at ``x0`` of the solution of ``s' = F(x, s)``, ``s(x0) = s0``.

    Each Picard sweep ``S <- s0 + int F(X, S)`` fixes one more Taylor
    coefficient, so ``order`` sweeps give the exact truncated series.
    """
    if order < 1:
        raise InsufficientOrderError("picard_jet needs order >= 1")
    X = jet_variable(x0, order)
    S = Jet(np.r_[s0, np.zeros(order)])
    for _ in range(order):
        rhs = F(X, S)
        S = rhs.truncate(order - 1).integrate(s0)
    return S


def revert_series(T: Jet, x0: float) -> Jet:
    """Inverse-function jet.

    ``T`` is the jet of ``t(x)`` at ``x0``.  The result is the jet of the
    inverse ``x(t)`` at ``t0 = T.value``, with constant term ``x0``.

    Raises
    ------
    SingularPointError
        If ``t'(x0) = 0``.
    """
    c = T.coeffs
    N = T.order
    if N < 1 or c[1] == 0.0:
        raise SingularPointError("series reversion needs a nonzero linear term")
    t1 = c[1]
    Q = Jet(np.r_[0.0, 0.0, c[2:]])  # nonlinear part of t(x) - t0
    tau = Jet(np.r_[0.0, 1.0, np.zeros(N - 1)])
    H = tau / t1
    for _ in range(N):
        H = (tau - Q.compose(H)) / t1
    out = H.coeffs
    out[0] = x0
    return Jet(out)
