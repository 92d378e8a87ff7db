"""Exception hierarchy shared by all modules.

Every error raised deliberately by the library derives from
:class:`GACurveError`.  The command line maps the subclasses onto exit
codes: :class:`UsageError` gives 1, :class:`IntegrationError` gives 3 and
everything else gives 2.
"""

from __future__ import annotations


class GACurveError(Exception):
    """Base class for all library errors."""

    #: short machine-readable tag, copied into JSON error reports
    kind = "error"


class UsageError(GACurveError):
    """Invalid arguments or configuration supplied by the caller."""

    kind = "usage"


class JetError(GACurveError):
    """Base class for failures of truncated power series arithmetic."""

    kind = "jet"


class InvalidOrderError(JetError):
    kind = "invalid-order"


class InsufficientOrderError(JetError):
    """A derivative beyond the truncation order was requested."""

    kind = "insufficient-order"


class SingularPointError(JetError):
    """Division by a series whose constant term vanishes."""

    kind = "singular-point"


class DomainError(JetError):
    """An elementary function was applied outside its real domain."""

    kind = "domain"

    def __init__(self, fn: str, c0: float, detail: str = ""):
        self.fn = fn
        self.c0 = c0
        msg = f"{fn} is undefined at constant term {c0!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ExprSyntaxError(GACurveError):
    """Lexer or parser failure, carrying the character offset."""

    kind = "syntax"

    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at offset {position}")


class UnknownNameError(GACurveError):
    """Unknown function name, builtin curve or unbound variable."""

    kind = "unknown-name"


class CurveEvaluationError(GACurveError):
    """Evaluation of a curve failed (out of interval, domain error, ...)."""

    kind = "evaluation"


class SampledOrderError(CurveEvaluationError):
    """Derivatives of order five or higher were requested from samples."""

    kind = "sampled-order"


class DegenerateCurveError(GACurveError):
    """The derivative frame x', x'' (x''') is not of full rank."""

    kind = "degenerate"


class AffineInflectionError(GACurveError):
    """The length density L vanishes, so the invariants are undefined."""

    kind = "affine-inflection"


class NotEquiaffineError(GACurveError):
    kind = "not-equiaffine"


class NonconvexGraphError(GACurveError):
    kind = "nonconvex-graph"


class ZeroCurvatureError(GACurveError):
    kind = "zero-equiaffine-curvature"


class IntegrationError(GACurveError):
    """The ODE integrator failed (step underflow, blow-up, ...)."""

    kind = "integration"


class AbelSingularityError(IntegrationError):
    """The Abel solution hit its singular set at abscissa ``x``."""

    kind = "abel-singularity"

    def __init__(self, message: str, x: float):
        self.x = x
        super().__init__(f"{message} at x = {x!r}")


class NormalizationError(GACurveError):
    """Two reconstructions are not related by an affine map."""

    kind = "ga-normalization"


class ClassificationError(GACurveError):
    kind = "classification"


class UnknownFunctionError(ExprSyntaxError):
    """A call names a function outside the supported elementary set."""

    kind = "unknown-function"
