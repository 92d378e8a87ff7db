"""A small expression language for curve coordinates and curvature profiles.

Grammar (EBNF)::

    vector     = "(" expression { "," expression } ")" ;
    expression = term { ("+" | "-") term } ;
    term       = unary { ("*" | "/") unary } ;
    unary      = "-" unary | "+" unary | power ;
    power      = atom [ ("^" | "**") unary ] ;          (* right-associative *)
    atom       = number | name | name "(" expression ")" | "(" expression ")" ;

``^`` binds tighter than unary minus, so ``-t^2`` means ``-(t^2)``, while
unary minus binds tighter than ``*`` and ``/``.  Whitespace is ignored.
The names ``pi`` and ``e`` are constants; every other bare name is a
variable that must be bound at evaluation time (``t`` for curves, ``x``
for Abel problems, ``k`` for curvature functionals, plus any free
parameters such as ``gamma``).  Callable names are the elementary
functions of :mod:`gacurves.jet`.

The parser is a Pratt (top-down operator precedence) parser.  Evaluation
is generic over numbers and :class:`~gacurves.jet.Jet` values, so the
same tree yields plain values and exact derivatives.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from . import jet as _jet
from .errors import DomainError, ExprSyntaxError, UnknownFunctionError, UnknownNameError
from .jet import Jet

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Const",
    "Neg",
    "BinOp",
    "Call",
    "parse_expression",
    "parse_vector",
    "as_expr",
]

CONSTANTS = {"pi": math.pi, "e": math.e}

Value = Union[float, Jet]


class Expr:
    """Base class of expression tree nodes."""

    def evaluate(self, env: Mapping[str, Value] | None = None) -> Value:
        raise NotImplementedError

    def names(self) -> set[str]:
        """Free variable names appearing in the tree."""
        return set()

    def __call__(self, **env: Value) -> Value:
        return self.evaluate(env)


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def evaluate(self, env=None):
        return self.value

    def __str__(self) -> str:
        return repr(float(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def evaluate(self, env=None):
        try:
            return env[self.name]  # type: ignore[index]
        except (KeyError, TypeError):
            raise UnknownNameError(f"unbound variable {self.name!r}") from None

    def names(self):
        return {self.name}

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const(Expr):
    name: str

    def evaluate(self, env=None):
        return CONSTANTS[self.name]

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, env=None):
        return -self.operand.evaluate(env)

    def names(self):
        return self.operand.names()

    def __str__(self) -> str:
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, env=None):
        lv = self.left.evaluate(env)
        rv = self.right.evaluate(env)
        op = self.op
        if op == "+":
            return lv + rv
        if op == "-":
            return lv - rv
        if op == "*":
            return lv * rv
        if op == "/":
            if not isinstance(rv, Jet) and rv == 0:
                raise DomainError("/", 0.0, "division by zero")
            return lv / rv
        return _power(lv, rv)

    def names(self):
        return self.left.names() | self.right.names()

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr

    def evaluate(self, env=None):
        return _jet.jet_elem(self.fn, self.arg.evaluate(env))

    def names(self):
        return self.arg.names()

    def __str__(self) -> str:
        return f"{self.fn}({self.arg})"


def _constant_exponent(rv: Value) -> float | None:
    """Return the exponent as a number if it does not vary with the variable."""
    if isinstance(rv, Jet):
        c = rv.coeffs
        if c.size > 1 and any(c[1:] != 0.0):
            return None
        return float(c[0])
    return float(rv)


def _power(lv: Value, rv: Value) -> Value:
    e = _constant_exponent(rv)
    if e is not None:
        if e.is_integer():
            if isinstance(lv, Jet):
                return _jet.pow_int(lv, int(e))
            if lv == 0 and e < 0:
                raise DomainError("pow", 0.0, "zero to a negative power")
            return float(lv) ** int(e)
        if isinstance(lv, Jet):
            return _jet.pow_real(lv, e)
        if not lv > 0:
            if lv == 0 and e > 0:
                return 0.0
            raise DomainError("pow", float(lv), f"real exponent {e!r} needs a positive base")
        return float(lv) ** e
    base = lv.value if isinstance(lv, Jet) else float(lv)
    if not base > 0:
        raise DomainError("pow", base, "variable exponent needs a positive base")
    return _jet.exp(rv * _jet.log(lv))


# ----------------------------------------------------------------------
# lexer
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, name, op, eof
    text: str
    pos: int
    end: int


def _tokenize(src: str) -> Iterator[_Token]:
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if text == "**":
                text = "^"
            yield _Token(kind, text, m.start(), m.end())
        pos = m.end()
    yield _Token("eof", "", n, n)


# binding powers
_INFIX_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_BP = 25


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = list(_tokenize(src))
        self.i = 0
        self.last_end = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        self.last_end = t.end
        return t

    def error(self, message: str) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.last_end, self.src)

    def expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind != "op":
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r} but found {found!r}")
        return self.advance()

    def parse(self, rbp: int = 0, allow_vector: bool = False):
        left = self.prefix(allow_vector)
        while not isinstance(left, tuple):
            t = self.tok
            if t.kind != "op" or t.text not in _INFIX_BP:
                break
            bp = _INFIX_BP[t.text]
            if bp <= rbp:
                break
            self.advance()
            if t.text == "^":
                right = self.parse(bp - 1)  # right associative
            else:
                right = self.parse(bp)
            left = BinOp(t.text, left, right)
        return left

    def prefix(self, allow_vector: bool = False):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in _jet.ELEMENTARY:
                    raise UnknownFunctionError(f"unknown function {t.text!r}", t.pos, self.src)
                self.advance()
                arg = self.parse(0)
                self.expect(")")
                return Call(t.text, arg)
            if t.text in CONSTANTS:
                return Const(t.text)
            return Var(t.text)
        if t.kind == "op" and t.text in "-+" and t.text:
            self.advance()
            operand = self.parse(_UNARY_BP)
            return Neg(operand) if t.text == "-" else operand
        if t.kind == "op" and t.text == "(":
            self.advance()
            first = self.parse(0)
            if allow_vector and self.tok.kind == "op" and self.tok.text == ",":
                items = [first]
                while self.tok.kind == "op" and self.tok.text == ",":
                    self.advance()
                    items.append(self.parse(0))
                self.expect(")")
                return tuple(items)
            self.expect(")")
            return first
        found = t.text or "end of input"
        raise self.error(f"expected an operand but found {found!r}")

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error(f"expected an operator or end of input but found {self.tok.text!r}")


def parse_expression(src: str) -> Expr:
    """Parse a scalar expression.

    Parameters
    ----------
    src : str
        Source text, e.g. ``"exp(g*t)*cos(a*t)"``.

    Returns
    -------
    Expr
        Root of the expression tree.

    Raises
    ------
    ExprSyntaxError
        On lexer or parser failure; ``position`` holds the offset.
    UnknownFunctionError
        When a call names a function that is not supported.
    """
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError("empty expression", 0, src if isinstance(src, str) else "")
    p = _Parser(src)
    node = p.parse(0)
    p.finish()
    return node


def parse_vector(src: str) -> tuple[Expr, ...]:
    """Parse a parenthesized comma list ``"(e1, e2[, e3])"``.

    A plain scalar expression is returned as a 1-tuple.
    """
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError("empty expression", 0, src if isinstance(src, str) else "")
    p = _Parser(src)
    node = p.parse(0, allow_vector=True)
    p.finish()
    if isinstance(node, tuple):
        return node
    return (node,)


def as_expr(value: "Expr | str | float") -> Expr:
    """Coerce a string, number or tree into an :class:`Expr`."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse_expression(value)
    return Num(float(value))
