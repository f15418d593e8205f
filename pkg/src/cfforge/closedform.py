"""Formal Q-linear combinations of constant atoms.

A ClosedForm maps atoms to exact rational coefficients.  The telescoping
engine produces forms over {One, Zeta(k), LogPrime(p), EulerGamma,
Digamma(a), Hurwitz(k, a)}; the recognizer may additionally emit Const
atoms wrapping arbitrary constant expressions (pi, catalan, pi*sqrt(3), ...)
so that any basis entry can appear in a result.

Digamma and Hurwitz shifts are always reduced into (0, 1); integer and
half-integer shifts are folded away into zeta values, log 2 and gamma before
an atom is ever created, so those two atom kinds only carry "other" rational
shifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

import mpmath as mp

from . import exprlang, mpval
from .errors import DomainError


class Atom:
    __slots__ = ()


@dataclass(frozen=True)
class One(Atom):
    pass


@dataclass(frozen=True)
class Zeta(Atom):
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("Zeta atom requires k >= 2")


@dataclass(frozen=True)
class LogPrime(Atom):
    p: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"{self.p} is not prime")


@dataclass(frozen=True)
class EulerGamma(Atom):
    pass


@dataclass(frozen=True)
class Digamma(Atom):
    a: Fraction

    def __post_init__(self):
        if not (0 < self.a < 1) or self.a.denominator == 1:
            raise ValueError("Digamma atom shift must be in (0,1) and non-integer")


@dataclass(frozen=True)
class Hurwitz(Atom):
    k: int
    a: Fraction

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("Hurwitz atom requires k >= 2")
        if not (0 < self.a < 1) or self.a.denominator == 1:
            raise ValueError("Hurwitz atom shift must be in (0,1) and non-integer")


@dataclass(frozen=True)
class Const(Atom):
    """A constant expression used as an opaque basis atom."""

    expr: exprlang.Expr

    def __post_init__(self):
        if not exprlang.is_constant(self.expr):
            raise ValueError("Const atom must not contain the variable")


ONE = One()
EULER_GAMMA = EulerGamma()


def _sort_key(atom: Atom):
    if isinstance(atom, One):
        return (0,)
    if isinstance(atom, Zeta):
        return (1, atom.k)
    if isinstance(atom, LogPrime):
        return (2, atom.p)
    if isinstance(atom, EulerGamma):
        return (3,)
    if isinstance(atom, Digamma):
        return (4, atom.a)
    if isinstance(atom, Hurwitz):
        return (5, atom.k, atom.a)
    return (6, exprlang.render(atom.expr))


def atom_value(atom: Atom, precision_bits: int) -> mp.mpf:
    if isinstance(atom, One):
        return mp.mpf(1)
    if isinstance(atom, Zeta):
        return mpval.zeta_int(atom.k, precision_bits)
    if isinstance(atom, LogPrime):
        return mpval.log_rational(atom.p, precision_bits)
    if isinstance(atom, EulerGamma):
        return mpval.const_gamma(precision_bits)
    if isinstance(atom, Digamma):
        return mpval.digamma_rational(atom.a, precision_bits)
    if isinstance(atom, Hurwitz):
        return mpval.hurwitz_zeta_int(atom.k, atom.a, precision_bits)
    if isinstance(atom, Const):
        return exprlang.eval_float(atom.expr, None, precision_bits)
    raise TypeError(f"not an Atom: {atom!r}")


def atom_label(atom: Atom, style: str = "zeta") -> str:
    if isinstance(atom, One):
        return "1"
    if isinstance(atom, Zeta):
        return f"zeta({atom.k})"
    if isinstance(atom, LogPrime):
        return f"log({atom.p})"
    if isinstance(atom, EulerGamma):
        return "gamma"
    if isinstance(atom, Digamma):
        return f"psi({atom.a})"
    if isinstance(atom, Hurwitz):
        return f"hurwitz({atom.k},{atom.a})"
    return exprlang.render(atom.expr)


class ClosedForm:
    """Immutable-by-convention map Atom -> nonzero Fraction coefficient."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Union[Mapping[Atom, Fraction], Iterable] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        d: dict[Atom, Fraction] = {}
        for atom, c in items:
            c = Fraction(c)
            if c:
                d[atom] = d.get(atom, Fraction(0)) + c
                if not d[atom]:
                    del d[atom]
        object.__setattr__(self, "_coeffs", d)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("ClosedForm is immutable")

    @classmethod
    def zero(cls) -> "ClosedForm":
        return cls()

    @classmethod
    def rational(cls, c: Union[int, Fraction]) -> "ClosedForm":
        return cls([(ONE, Fraction(c))])

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient(self, atom: Atom) -> Fraction:
        return self._coeffs.get(atom, Fraction(0))

    def atoms(self) -> tuple[Atom, ...]:
        return tuple(sorted(self._coeffs, key=_sort_key))

    def items(self) -> list[tuple[Atom, Fraction]]:
        return [(a, self._coeffs[a]) for a in self.atoms()]

    def as_dict(self) -> dict[Atom, Fraction]:
        return dict(self._coeffs)

    def __add__(self, other: "ClosedForm") -> "ClosedForm":
        merged = dict(self._coeffs)
        for a, c in other._coeffs.items():
            merged[a] = merged.get(a, Fraction(0)) + c
        return ClosedForm(merged)

    def __neg__(self) -> "ClosedForm":
        return ClosedForm({a: -c for a, c in self._coeffs.items()})

    def __sub__(self, other: "ClosedForm") -> "ClosedForm":
        return self + (-other)

    def scale(self, c: Union[int, Fraction]) -> "ClosedForm":
        c = Fraction(c)
        return ClosedForm({a: c * v for a, v in self._coeffs.items()})

    def add_term(self, atom: Atom, c: Union[int, Fraction]) -> "ClosedForm":
        return self + ClosedForm([(atom, Fraction(c))])

    def __eq__(self, other) -> bool:
        return isinstance(other, ClosedForm) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __repr__(self) -> str:
        return f"ClosedForm({render_closed_form(self) or '0'})"


def eval_closed_form(cf: ClosedForm, precision_bits: int) -> mp.mpf:
    """Numeric value of a closed form, error < 2^-(precision_bits - 2)."""
    wp = precision_bits + mpval.GUARD_BITS
    with mp.workprec(wp):
        total = mp.mpf(0)
        for atom, c in cf.items():
            total += mpval.mpf_from_fraction(c) * atom_value(atom, wp)
    with mp.workprec(precision_bits):
        return +total


def _format_coeff(c: Fraction, label: str | None) -> str:
    if label is None:
        return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
    mag = abs(c)
    if mag == 1:
        return label
    if mag.denominator == 1:
        return f"{mag.numerator}*{label}"
    return f"{mag.numerator}/{mag.denominator}*{label}"


def render_closed_form(cf: ClosedForm, style: str = "zeta") -> str:
    """Render as expression text; empty string for the zero form.

    style="zeta" keeps zeta atoms; style="pi" rewrites zeta(2k) as the exact
    Bernoulli rational times pi^(2k).
    """
    if style not in ("zeta", "pi"):
        raise ValueError("style must be 'zeta' or 'pi'")
    pieces: list[tuple[Fraction, str | None]] = []
    for atom, c in cf.items():
        if isinstance(atom, One):
            pieces.append((c, None))
        elif style == "pi" and isinstance(atom, Zeta) and atom.k % 2 == 0:
            half = atom.k // 2
            pieces.append((c * mpval.zeta_even_coeff(half), f"pi^{atom.k}"))
        else:
            pieces.append((c, atom_label(atom)))
    out = []
    for i, (c, label) in enumerate(pieces):
        body = _format_coeff(abs(c), label)
        if i == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append((" + " if c > 0 else " - ") + body)
    return "".join(out)
