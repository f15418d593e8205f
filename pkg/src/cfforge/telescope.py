"""Exact symbolic closed forms for the limit series via partial fractions.

For a spec (f, g) whose term function

    T(n) = g(0)^2 / (f(n+1) g(n) g(n+1))

is a rational function whose denominator splits into rational-shift linear
factors, the series sum(T(n), n >= 0) telescopes into an exact Q-linear
combination of zeta values, logs, gamma and digamma/Hurwitz atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .closedform import (
    EULER_GAMMA,
    ONE,
    ClosedForm,
    Digamma,
    Hurwitz,
    LogPrime,
    Zeta,
    eval_closed_form,
    render_closed_form,
)
from .errors import (
    DegreeTooHigh,
    DivergentSeries,
    DivisionByZero,
    NonConvergent,
    NotRational,
    Unsupported,
    UnsupportedShift,
)
from .exprlang import as_rational_function
from .qpoly import QPolynomial, RationalFunction

__all__ = [
    "LinearFactor",
    "ShiftFactorization",
    "NonLinearRemainder",
    "PoleTerm",
    "factor_shifts",
    "partial_fractions",
    "sum_closed_form",
    "closed_form_for",
    "series_pole_terms",
    "tail_closed_form",
    "eval_closed_form",
    "render_closed_form",
]


@dataclass(frozen=True)
class LinearFactor:
    """The factor (n + shift)^multiplicity."""

    shift: Fraction
    multiplicity: int


@dataclass(frozen=True)
class ShiftFactorization:
    """unit * product of (n + shift)^multiplicity, factors sorted by shift."""

    unit: Fraction
    factors: tuple[LinearFactor, ...]

    def expand(self) -> QPolynomial:
        out = QPolynomial.constant(self.unit)
        for fac in self.factors:
            out = out * QPolynomial.linear(fac.shift) ** fac.multiplicity
        return out


@dataclass(frozen=True)
class NonLinearRemainder:
    """Reported when a polynomial has an irreducible non-linear part."""

    remainder: QPolynomial
    unit: Fraction
    factors: tuple[LinearFactor, ...]


@dataclass(frozen=True)
class PoleTerm:
    """The summand coefficient / (n + shift)^power."""

    coefficient: Fraction
    shift: Fraction
    power: int


def _divisors(n: int, cap: int = 200_000) -> list[int]:
    """Positive divisors of |n| via trial-division factorization."""
    n = abs(n)
    if n == 0:
        return []
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n and d < cap:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    divs = [1]
    for p, m in factors.items():
        divs = [dv * p**i for dv in divs for i in range(m + 1)]
    return sorted(set(divs))


def factor_shifts(
    p: QPolynomial,
) -> Union[ShiftFactorization, NonLinearRemainder]:
    """Complete factorization over Q into linear factors (n + a)^m, or the
    monic non-linear remainder when rational roots do not exhaust it."""
    if p.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    unit = p.leading
    remaining = p.monic()
    counts: dict[Fraction, int] = {}
    # root at zero: strip trailing zero coefficients
    while remaining.degree > 0 and remaining.constant_term == 0:
        remaining = remaining // QPolynomial.x()
        counts[Fraction(0)] = counts.get(Fraction(0), 0) + 1
    while remaining.degree > 0:
        _, prim = remaining.primitive()
        c0, cd = int(prim.constant_term), int(prim.leading)
        found = None
        for u in _divisors(c0):
            for w in _divisors(cd):
                for root in (Fraction(u, w), Fraction(-u, w)):
                    if prim.eval(root) == 0:
                        found = root
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        shift = -found
        while remaining.eval(found) == 0:
            remaining = remaining // QPolynomial.linear(shift)
            counts[shift] = counts.get(shift, 0) + 1
    factors = tuple(
        LinearFactor(a, m) for a, m in sorted(counts.items(), key=lambda kv: kv[0])
    )
    if remaining.degree > 0:
        return NonLinearRemainder(remaining, unit, factors)
    return ShiftFactorization(unit, factors)


def _series_inverse(q: Sequence[Fraction], order: int) -> list[Fraction]:
    """Power-series inverse of q (q[0] != 0) to the given order."""
    inv = [Fraction(1) / q[0]]
    for k in range(1, order):
        acc = Fraction(0)
        for i in range(1, min(k, len(q) - 1) + 1):
            acc += q[i] * inv[k - i]
        inv.append(-acc / q[0])
    return inv


def partial_fractions(
    num: QPolynomial, factors: Sequence[LinearFactor]
) -> list[PoleTerm]:
    """Exact decomposition of num / prod (n+a)^m into PoleTerms.

    Requires deg(num) < sum of multiplicities and pairwise-distinct shifts.
    """
    total = sum(f.multiplicity for f in factors)
    if num.degree >= total:
        raise DegreeTooHigh(
            f"numerator degree {num.degree} >= total multiplicity {total}"
        )
    shifts = [f.shift for f in factors]
    if len(set(shifts)) != len(shifts):
        raise ValueError("factor shifts must be pairwise distinct")
    terms: list[PoleTerm] = []
    for fac in factors:
        rest = QPolynomial.one()
        for other in factors:
            if other is not fac:
                rest = rest * QPolynomial.linear(other.shift) ** other.multiplicity
        m = fac.multiplicity
        # Taylor-expand num/rest at n = -shift: substitute n = t - shift.
        num_t = num.shift(-fac.shift)
        rest_t = rest.shift(-fac.shift)
        inv = _series_inverse(rest_t.coeffs, m)
        for j in range(m):
            c = Fraction(0)
            for i in range(j + 1):
                c += num_t.coefficient(i) * inv[j - i]
            if c:
                terms.append(PoleTerm(c, fac.shift, m - j))
    return terms


def _merge_terms(terms) -> dict[tuple[Fraction, int], Fraction]:
    merged: dict[tuple[Fraction, int], Fraction] = {}
    for t in terms:
        if not isinstance(t.shift, Fraction) and not isinstance(t.shift, int):
            raise UnsupportedShift(f"non-rational shift {t.shift!r}")
        key = (Fraction(t.shift), t.power)
        merged[key] = merged.get(key, Fraction(0)) + t.coefficient
    return {k: v for k, v in merged.items() if v}


def sum_closed_form(terms: Sequence[PoleTerm]) -> ClosedForm:
    """Exact value of sum over n >= 0 of all PoleTerms as a ClosedForm.

    Simple-pole coefficients must cancel (otherwise the formal series
    diverges and NonConvergent is raised).  Shifts <= 0 are handled by
    peeling initial terms off into exact rationals.
    """
    merged = _merge_terms(terms)
    if not merged:
        return ClosedForm.zero()
    simple = sum(
        (c for (a, m), c in merged.items() if m == 1),
        start=Fraction(0),
    )
    if simple != 0:
        raise NonConvergent(
            f"simple-pole coefficients sum to {simple}, not zero"
        )
    min_shift = min(a for a, _ in merged)
    peel = 0 if min_shift > 0 else math.floor(-min_shift) + 1
    result = ClosedForm.zero()
    if peel:
        head = Fraction(0)
        for (a, m), c in merged.items():
            for n in range(peel):
                base = n + a
                if base == 0:
                    raise DivisionByZero(f"1/(n+{a})^{m}", at=n)
                head += c / base**m
        result = result.add_term(ONE, head)
        merged = {(a + peel, m): c for (a, m), c in merged.items()}

    for (a, m), c in sorted(merged.items()):
        if a.denominator == 1:
            b, k = Fraction(1), int(a) - 1
        else:
            b, k = a - math.floor(a), math.floor(a)
        if m == 1:
            # contribution is (-c) * psi(a); psi(a) = psi(b) + sum 1/(b+j)
            mu = -c
            head = sum((Fraction(1) / (b + j) for j in range(k)), start=Fraction(0))
            result = result.add_term(ONE, mu * head)
            if b == 1:
                result = result.add_term(EULER_GAMMA, -mu)  # psi(1) = -gamma
            elif b == Fraction(1, 2):
                # psi(1/2) = -gamma - 2 log 2
                result = result.add_term(EULER_GAMMA, -mu)
                result = result.add_term(LogPrime(2), -2 * mu)
            else:
                result = result.add_term(Digamma(b), mu)
        else:
            # contribution is c * zeta(m, a); zeta(m,a) = zeta(m,b) - head
            head = sum((Fraction(1) / (b + j) ** m for j in range(k)), start=Fraction(0))
            result = result.add_term(ONE, -c * head)
            if b == 1:
                result = result.add_term(Zeta(m), c)
            elif b == Fraction(1, 2):
                # zeta(m, 1/2) = (2^m - 1) zeta(m)
                result = result.add_term(Zeta(m), c * (2**m - 1))
            else:
                result = result.add_term(Hurwitz(m, b), c)
    return result


def term_rational_function(spec) -> RationalFunction:
    """T(n) = g(0)^2 / (f(n+1) g(n) g(n+1)) as an exact rational function.

    Raises NotRational when f or g contains non-rational atoms."""
    f = as_rational_function(spec.f)
    g = as_rational_function(spec.g)
    g0 = g.eval(0)
    denom = f.shift(1) * g * g.shift(1)
    if denom.is_zero:
        raise DivergentSeries("term denominator is identically zero")
    return denom.inverse() * (g0 * g0)


def series_pole_terms(spec) -> list[PoleTerm]:
    """Partial-fraction terms of the series summand, or Unsupported."""
    try:
        t = term_rational_function(spec)
    except NotRational as exc:
        raise Unsupported(str(exc)) from exc
    if t.num.degree > t.den.degree - 2:
        raise DivergentSeries(
            f"term decays like n^{t.num.degree - t.den.degree}; need degree <= -2"
        )
    fac = factor_shifts(t.den)
    if isinstance(fac, NonLinearRemainder):
        raise Unsupported(
            f"denominator has a non-linear factor over Q: {fac.remainder}"
        )
    scaled_num = t.num.scale(1 / fac.unit)
    return partial_fractions(scaled_num, fac.factors)


def closed_form_for(spec) -> ClosedForm:
    """Exact closed form of S = g(0)^2 sum 1/(f(i+1) g(i) g(i+1)).

    Raises Unsupported when the denominator does not split into rational
    linear factors (callers fall back to numeric verification)."""
    return sum_closed_form(series_pole_terms(spec))


def tail_closed_form(spec, start: int) -> ClosedForm:
    """Exact closed form of the tail sum over n >= start."""
    if start < 0:
        raise ValueError("start must be >= 0")
    terms = [
        PoleTerm(t.coefficient, t.shift + start, t.power)
        for t in series_pole_terms(spec)
    ]
    return sum_closed_form(terms)
