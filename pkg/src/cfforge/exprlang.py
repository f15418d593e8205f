"""Expression language for sequence functions f(n), g(n) and constant forms.

Grammar (ASCII only, whitespace-insensitive)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' ['-'] INT)?
    atom     := INT | NAME '(' expr ')' | NAME | '(' expr ')'

'^' binds tighter than unary minus; the binary operators are
left-associative.  The single variable is written ``n``; ``z`` and ``v`` are
accepted as aliases and map to ``n``.  Named constants: ``pi``, ``gamma``,
``catalan``, ``e``.  Functions: ``sqrt``, ``exp``, ``log``, ``tanh``,
``coth``, ``tan``, ``cot``, ``atanh``, and ``zeta`` (which requires a
literal integer argument >= 2).  A quotient of two integer literals folds to
an exact rational literal at parse time; decimal literals are rejected.

Expressions are immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import mpmath as mp

from . import mpval
from .errors import (
    DivisionByZero,
    DomainError,
    ExprSyntaxError,
    NotExact,
    NotRational,
    UnknownIdentifierError,
)
from .qpoly import QPolynomial, RationalFunction


class Expr:
    """Base class for AST nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class RatLit(Expr):
    value: Fraction


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class NamedConst(Expr):
    name: str  # pi | gamma | catalan | e


@dataclass(frozen=True)
class Zeta(Expr):
    k: int


@dataclass(frozen=True)
class Func(Expr):
    name: str  # sqrt | exp | log | tanh | coth | tan | cot | atanh
    arg: Expr


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


VAR = Var()

FUNCTIONS = frozenset({"sqrt", "exp", "log", "tanh", "coth", "tan", "cot", "atanh"})
CONSTANTS = frozenset({"pi", "gamma", "catalan", "e"})
VAR_ALIASES = frozenset({"n", "z", "v"})

_LITERALS = (IntLit, RatLit)


def _lit(v: Union[int, Fraction]) -> Expr:
    v = Fraction(v)
    return IntLit(v.numerator) if v.denominator == 1 else RatLit(v)


def _lit_value(e: Expr) -> Optional[Fraction]:
    if isinstance(e, IntLit):
        return Fraction(e.value)
    if isinstance(e, RatLit):
        return e.value
    return None


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, offset: Optional[int] = None) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.pos if offset is None else offset)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.take(ch):
            raise self.error(f"expected {ch!r}")

    def parse_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected an integer")
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            raise self.error("decimal literals are not supported; use p/q", self.pos)
        return int(self.text[start : self.pos])

    def parse_name(self) -> tuple[str, int]:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        return self.text[start : self.pos], start

    # expr := term (('+'|'-') term)*
    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                node = Add(node, self.parse_term())
            elif ch == "-":
                self.pos += 1
                node = Sub(node, self.parse_term())
            else:
                return node

    # term := unary (('*'|'/') unary)*
    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                node = Mul(node, self.parse_unary())
            elif ch == "/":
                self.pos += 1
                rhs = self.parse_unary()
                lv, rv = _lit_value(node), _lit_value(rhs)
                if lv is not None and rv is not None and rv != 0:
                    # p/q is a rational literal, folded eagerly
                    node = _lit(lv / rv)
                else:
                    node = Div(node, rhs)
            else:
                return node

    # unary := '-' unary | power
    def parse_unary(self) -> Expr:
        if self.peek() == "-":
            self.pos += 1
            child = self.parse_unary()
            v = _lit_value(child)
            return _lit(-v) if v is not None else Neg(child)
        return self.parse_power()

    # power := atom ('^' ['-'] INT)?
    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            sign = 1
            if self.peek() == "-":
                self.pos += 1
                sign = -1
            paren = False
            if self.peek() == "(":
                # allow n^(-2)
                self.pos += 1
                paren = True
                if self.peek() == "-":
                    self.pos += 1
                    sign = -sign
            k = sign * self.parse_int()
            if paren:
                self.expect(")")
            return Pow(base, k)
        return base

    def parse_atom(self) -> Expr:
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            node = self.parse_expr()
            self.expect(")")
            return node
        if ch.isdigit():
            return IntLit(self.parse_int())
        if ch.isalpha():
            name, start = self.parse_name()
            if self.peek() == "(":
                self.pos += 1
                arg = self.parse_expr()
                self.expect(")")
                if name == "zeta":
                    k = _lit_value(normalize(arg))
                    if k is None or k.denominator != 1 or k < 2:
                        raise self.error(
                            "zeta requires a literal integer argument >= 2", start
                        )
                    return Zeta(int(k))
                if name in FUNCTIONS:
                    return Func(name, arg)
                raise UnknownIdentifierError(f"unknown function {name!r}", start)
            if name in VAR_ALIASES:
                return VAR
            if name in CONSTANTS:
                return NamedConst(name)
            raise UnknownIdentifierError(f"unknown identifier {name!r}", start)
        raise self.error(f"unexpected character {ch!r}")


def parse(text: str) -> Expr:
    """Parse expression text into a raw AST (only literal negation and p/q
    quotients are folded during parsing)."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    if not text.isascii():
        raise ExprSyntaxError("expression must be ASCII", 0)
    p = _Parser(text)
    node = p.parse_expr()
    p.skip_ws()
    if p.pos != len(text):
        raise p.error(f"unexpected trailing input {text[p.pos:]!r}")
    return node


# --------------------------------------------------------------------------
# Normalization and rendering
# --------------------------------------------------------------------------


def normalize(e: Expr) -> Expr:
    """Fold exact integer/rational arithmetic; idempotent.

    Products are never expanded and surd/transcendental atoms are left
    untouched, so the shape of an expression stays predictable.
    """
    if isinstance(e, _LITERALS):
        return _lit(_lit_value(e))
    if isinstance(e, (Var, NamedConst, Zeta)):
        return e
    if isinstance(e, Func):
        return Func(e.name, normalize(e.arg))
    if isinstance(e, Neg):
        c = normalize(e.child)
        v = _lit_value(c)
        if v is not None:
            return _lit(-v)
        if isinstance(c, Neg):
            return c.child
        return Neg(c)
    if isinstance(e, (Add, Sub, Mul, Div)):
        l, r = normalize(e.left), normalize(e.right)
        lv, rv = _lit_value(l), _lit_value(r)
        if lv is not None and rv is not None:
            if isinstance(e, Add):
                return _lit(lv + rv)
            if isinstance(e, Sub):
                return _lit(lv - rv)
            if isinstance(e, Mul):
                return _lit(lv * rv)
            if rv != 0:
                return _lit(lv / rv)
        return type(e)(l, r)
    if isinstance(e, Pow):
        b = normalize(e.base)
        v = _lit_value(b)
        if v is not None and (e.exponent >= 0 or v != 0):
            return _lit(v**e.exponent)
        return Pow(b, e.exponent)
    raise TypeError(f"not an Expr: {e!r}")


_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _node_prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, RatLit):
        return _PREC_MUL  # renders as p/q
    if isinstance(e, Neg):
        return _PREC_UNARY
    if isinstance(e, IntLit) and e.value < 0:
        return _PREC_UNARY
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _render(e: Expr, min_prec: int) -> str:
    prec = _node_prec(e)
    if isinstance(e, IntLit):
        s = str(e.value)
    elif isinstance(e, RatLit):
        s = f"{e.value.numerator}/{e.value.denominator}"
    elif isinstance(e, Var):
        s = "n"
    elif isinstance(e, NamedConst):
        s = e.name
    elif isinstance(e, Zeta):
        s = f"zeta({e.k})"
    elif isinstance(e, Func):
        s = f"{e.name}({_render(e.arg, _PREC_ADD)})"
    elif isinstance(e, Neg):
        s = f"-{_render(e.child, _PREC_POW)}"
    elif isinstance(e, Add):
        s = f"{_render(e.left, _PREC_ADD)}+{_render(e.right, _PREC_MUL)}"
    elif isinstance(e, Sub):
        s = f"{_render(e.left, _PREC_ADD)}-{_render(e.right, _PREC_MUL)}"
    elif isinstance(e, Mul):
        s = f"{_render(e.left, _PREC_MUL)}*{_render(e.right, _PREC_UNARY)}"
    elif isinstance(e, Div):
        s = f"{_render(e.left, _PREC_MUL)}/{_render(e.right, _PREC_UNARY)}"
    elif isinstance(e, Pow):
        s = f"{_render(e.base, _PREC_ATOM)}^{e.exponent}"
    else:  # pragma: no cover
        raise TypeError(f"not an Expr: {e!r}")
    return f"({s})" if prec < min_prec else s


def render(e: Expr) -> str:
    """Canonical text such that parse(render(e)) == normalize(e)."""
    return _render(normalize(e), _PREC_ADD)


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------


def is_constant(e: Expr) -> bool:
    """True when the expression does not mention the variable."""
    if isinstance(e, Var):
        return False
    if isinstance(e, Func):
        return is_constant(e.arg)
    if isinstance(e, Neg):
        return is_constant(e.child)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return is_constant(e.left) and is_constant(e.right)
    if isinstance(e, Pow):
        return is_constant(e.base)
    return True


def _sqrt_fraction(v: Fraction) -> Optional[Fraction]:
    if v < 0:
        return None
    import math

    rn, rd = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if rn * rn == v.numerator and rd * rd == v.denominator:
        return Fraction(rn, rd)
    return None


def eval_rational(e: Expr, n: Union[int, Fraction]) -> Fraction:
    """Exact evaluation at a rational point.

    Raises NotExact when a surd or transcendental atom survives folding, and
    DivisionByZero (naming the subterm) on an exactly-zero denominator.
    """
    n = Fraction(n)

    def go(e: Expr) -> Fraction:
        if isinstance(e, IntLit):
            return Fraction(e.value)
        if isinstance(e, RatLit):
            return e.value
        if isinstance(e, Var):
            return n
        if isinstance(e, (NamedConst, Zeta)):
            raise NotExact(f"{render(e)} is not rational")
        if isinstance(e, Func):
            v = go(e.arg)
            if e.name == "sqrt":
                r = _sqrt_fraction(v)
                if r is None:
                    raise NotExact(f"sqrt({v}) is not rational")
                return r
            if e.name in ("exp",) and v == 0:
                return Fraction(1)
            if e.name in ("log",) and v == 1:
                return Fraction(0)
            if e.name in ("tanh", "tan", "atanh") and v == 0:
                return Fraction(0)
            if e.name in ("coth", "cot") and v == 0:
                raise DivisionByZero(render(e), at=n)
            raise NotExact(f"{e.name}({v}) is not rational")
        if isinstance(e, Neg):
            return -go(e.child)
        if isinstance(e, Add):
            return go(e.left) + go(e.right)
        if isinstance(e, Sub):
            return go(e.left) - go(e.right)
        if isinstance(e, Mul):
            return go(e.left) * go(e.right)
        if isinstance(e, Div):
            denom = go(e.right)
            if denom == 0:
                raise DivisionByZero(render(e.right), at=n)
            return go(e.left) / denom
        if isinstance(e, Pow):
            base = go(e.base)
            if base == 0 and e.exponent < 0:
                raise DivisionByZero(render(e), at=n)
            return base**e.exponent
        raise TypeError(f"not an Expr: {e!r}")

    return go(e)


EVAL_GUARD_BITS = 32


def eval_float(e: Expr, n=None, precision_bits: int = 128) -> mp.mpf:
    """Big-float evaluation, accurate to 2^-(precision_bits) with a 32-bit
    internal guard.  ``n`` may be an int, Fraction or mpf; None is allowed
    for constant expressions."""
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    wp = precision_bits + EVAL_GUARD_BITS

    def go(e: Expr) -> mp.mpf:
        if isinstance(e, IntLit):
            return mp.mpf(e.value)
        if isinstance(e, RatLit):
            return mp.mpf(e.value.numerator) / e.value.denominator
        if isinstance(e, Var):
            if n is None:
                raise ValueError("expression contains the variable but n is None")
            if isinstance(n, Fraction):
                return mp.mpf(n.numerator) / n.denominator
            return mp.mpf(n)
        if isinstance(e, NamedConst):
            if e.name == "pi":
                return mpval.const_pi(wp)
            if e.name == "gamma":
                return mpval.const_gamma(wp)
            if e.name == "catalan":
                return mpval.const_catalan(wp)
            return mp.exp(mp.mpf(1))  # e
        if isinstance(e, Zeta):
            return mpval.zeta_int(e.k, wp)
        if isinstance(e, Func):
            return mpval.apply_elem(e.name, go(e.arg))
        if isinstance(e, Neg):
            return -go(e.child)
        if isinstance(e, Add):
            return go(e.left) + go(e.right)
        if isinstance(e, Sub):
            return go(e.left) - go(e.right)
        if isinstance(e, Mul):
            return go(e.left) * go(e.right)
        if isinstance(e, Div):
            denom = go(e.right)
            if denom == 0:
                raise DivisionByZero(render(e.right), at=n)
            return go(e.left) / denom
        if isinstance(e, Pow):
            base = go(e.base)
            if base == 0 and e.exponent < 0:
                raise DivisionByZero(render(e), at=n)
            return base**e.exponent
        raise TypeError(f"not an Expr: {e!r}")

    with mp.workprec(wp):
        value = go(e)
    with mp.workprec(precision_bits):
        return +value


def as_rational_function(e: Expr) -> RationalFunction:
    """Convert to a canonical reduced rational function of n.

    Raises NotRational when the expression contains surd or transcendental
    atoms."""
    if isinstance(e, IntLit):
        return RationalFunction.from_scalar(e.value)
    if isinstance(e, RatLit):
        return RationalFunction.from_scalar(e.value)
    if isinstance(e, Var):
        return RationalFunction.x()
    if isinstance(e, (NamedConst, Zeta, Func)):
        raise NotRational(f"{render(e)} is not a rational function")
    if isinstance(e, Neg):
        return -as_rational_function(e.child)
    if isinstance(e, Add):
        return as_rational_function(e.left) + as_rational_function(e.right)
    if isinstance(e, Sub):
        return as_rational_function(e.left) - as_rational_function(e.right)
    if isinstance(e, Mul):
        return as_rational_function(e.left) * as_rational_function(e.right)
    if isinstance(e, Div):
        return as_rational_function(e.left) / as_rational_function(e.right)
    if isinstance(e, Pow):
        return as_rational_function(e.base) ** e.exponent
    raise TypeError(f"not an Expr: {e!r}")


def substitute_var(e: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable with another expression."""
    if isinstance(e, Var):
        return replacement
    if isinstance(e, Func):
        return Func(e.name, substitute_var(e.arg, replacement))
    if isinstance(e, Neg):
        return Neg(substitute_var(e.child, replacement))
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(
            substitute_var(e.left, replacement), substitute_var(e.right, replacement)
        )
    if isinstance(e, Pow):
        return Pow(substitute_var(e.base, replacement), e.exponent)
    return e


@lru_cache(maxsize=None)
def _shifted(e: Expr, offset: int) -> Expr:
    target = VAR if offset == 0 else (
        Add(VAR, IntLit(offset)) if offset > 0 else Sub(VAR, IntLit(-offset))
    )
    return substitute_var(e, target)


def shift_var(e: Expr, offset: int) -> Expr:
    """The expression with n replaced by n + offset."""
    return _shifted(e, offset)


def expr_from_fraction(c: Union[int, Fraction]) -> Expr:
    return _lit(c)


def expr_from_polynomial(p: QPolynomial) -> Expr:
    """Canonical Expr for a polynomial, highest degree first."""
    if p.is_zero:
        return IntLit(0)
    terms: list[Expr] = []
    for k in range(p.degree, -1, -1):
        c = p.coefficient(k)
        if not c:
            continue
        if k == 0:
            terms.append(_lit(c))
        else:
            mono: Expr = VAR if k == 1 else Pow(VAR, k)
            terms.append(mono if c == 1 else Mul(_lit(c), mono))
    out = terms[0]
    for t in terms[1:]:
        out = Add(out, t)
    return normalize(out)


def expr_from_rational(rf: RationalFunction) -> Expr:
    if rf.is_polynomial:
        return expr_from_polynomial(rf.as_polynomial())
    return normalize(Div(expr_from_polynomial(rf.num), expr_from_polynomial(rf.den)))
