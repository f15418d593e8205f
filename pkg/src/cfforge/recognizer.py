"""Integer-relation detection (PSLQ) and constant recognition.

The recognizer is the closed-form discovery fallback when telescoping is
unsupported: a high-precision limit value is matched against a basis of
known constants by searching for a small integer relation.

Every accepted recognition is re-verified with the basis constants
re-evaluated at 64 extra bits; the residual must shrink by at least 2^32 or
the match is demoted to no-match.  The queried value must therefore carry
at least precision_bits + 64 accurate bits to be recognizable (callers
evaluate it with headroom); a value accurate only to precision_bits, e.g. a
perturbed or noisy constant, fails the gate by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Union

import mpmath as mp

from . import exprlang
from .closedform import (
    Atom,
    ClosedForm,
    Const,
    EULER_GAMMA,
    ONE,
    LogPrime,
    Zeta,
    atom_value,
)
from .errors import PrecisionTooLow

_GAMMA2 = Fraction(4, 3)  # gamma^2 for the PSLQ pivot weights


@dataclass(frozen=True)
class Relation:
    """An integer relation sum(coefficients[i] * values[i]) ~ 0.

    Canonical: gcd of coefficients is 1 and the first nonzero coefficient
    is positive.  confidence_bits = -log2(residual) minus the coefficient
    mass (total bit length of the coefficients)."""

    coefficients: tuple[int, ...]
    residual: mp.mpf
    confidence_bits: int


@dataclass(frozen=True)
class BasisEntry:
    label: str
    atom: Atom

    def value(self, precision_bits: int) -> mp.mpf:
        return atom_value(self.atom, precision_bits)


@dataclass(frozen=True)
class ConstantBasis:
    """Ordered basis of constants; the queried value is prepended at
    relation time, it is never stored in the basis."""

    entries: tuple[BasisEntry, ...]
    level: int = 0

    def __post_init__(self):
        labels = [e.label for e in self.entries]
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")

    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.entries)

    def values(self, precision_bits: int) -> list[mp.mpf]:
        return [e.value(precision_bits) for e in self.entries]


def basis_from_atoms(atoms: Sequence[Atom], level: int = 0) -> ConstantBasis:
    from .closedform import atom_label

    return ConstantBasis(
        tuple(BasisEntry(atom_label(a), a) for a in atoms), level=level
    )


def default_basis(level: int) -> ConstantBasis:
    """Built-in bases.

    level 1: {1, zeta(2), ..., zeta(8)}
    level 2: level 1 + {gamma, log(2), log(3), catalan, pi}
    level 3: level 2 + {pi*sqrt(2), pi*sqrt(3), pi^2*log(2)}
    """
    if level not in (1, 2, 3):
        raise ValueError("basis level must be 1, 2 or 3")
    atoms: list[Atom] = [ONE] + [Zeta(k) for k in range(2, 9)]
    if level >= 2:
        atoms += [
            EULER_GAMMA,
            LogPrime(2),
            LogPrime(3),
            Const(exprlang.parse("catalan")),
            Const(exprlang.parse("pi")),
        ]
    if level >= 3:
        atoms += [
            Const(exprlang.parse("pi*sqrt(2)")),
            Const(exprlang.parse("pi*sqrt(3)")),
            Const(exprlang.parse("pi^2*log(2)")),
        ]
    return basis_from_atoms(atoms, level=level)


def _canonical(vec: list[int]) -> Optional[tuple[int, ...]]:
    if not any(vec):
        return None
    g = 0
    for v in vec:
        g = gcd(g, abs(v))
    vec = [v // g for v in vec]
    first = next(v for v in vec if v)
    if first < 0:
        vec = [-v for v in vec]
    return tuple(vec)


def _residual(vec: Sequence[int], values: Sequence[mp.mpf]) -> mp.mpf:
    return abs(mp.fsum(m * v for m, v in zip(vec, values)))


def pslq(
    values: Sequence[mp.mpf],
    precision_bits: int,
    max_coeff_bits: int = 64,
    max_steps: int = 0,
) -> Optional[Relation]:
    """Find a small integer relation among the values, or None.

    Accepts a relation when |sum m_i v_i| < 2^-(precision_bits/2) and every
    |m_i| < 2^max_coeff_bits.  Values must be accurate to precision_bits.
    """
    n = len(values)
    if n < 2:
        raise ValueError("pslq needs at least 2 values")
    if precision_bits < 128:
        raise PrecisionTooLow("pslq requires precision_bits >= 128")
    wp = precision_bits + 64
    if max_steps <= 0:
        max_steps = 2048 + 128 * n * n
    accept = mp.mpf(2) ** (-(precision_bits // 2))
    detect = mp.mpf(2) ** (-int(precision_bits * 0.85))
    coeff_cap = 1 << max_coeff_bits

    with mp.workprec(wp):
        x = [mp.mpf(v) for v in values]
        if any(v == 0 for v in x):
            raise ValueError("pslq requires nonzero values")
        gamma = mp.sqrt(mp.mpf(4) / 3)

        # initialization: partial norms, normalized y, lower-trapezoidal H
        s = [mp.mpf(0)] * n
        acc = mp.mpf(0)
        for k in range(n - 1, -1, -1):
            acc += x[k] * x[k]
            s[k] = mp.sqrt(acc)
        t = s[0]
        y = [xk / t for xk in x]
        s = [sk / t for sk in s]
        H = [[mp.mpf(0)] * (n - 1) for _ in range(n)]
        for j in range(n - 1):
            H[j][j] = s[j + 1] / s[j]
        for i in range(n):
            for j in range(i):
                H[i][j] = -y[i] * y[j] / (s[j] * s[j + 1])
        B = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

        def reduce_row(i: int, max_j: int) -> None:
            for j in range(max_j, -1, -1):
                if H[j][j] == 0:
                    continue
                t = mp.nint(H[i][j] / H[j][j])
                if t == 0:
                    continue
                ti = int(t)
                y[j] += t * y[i]
                for k in range(j + 1):
                    H[i][k] -= t * H[j][k]
                for k in range(n):
                    B[k][j] += ti * B[k][i]

        for i in range(1, n):
            reduce_row(i, i - 1)

        def extract(j: int) -> Optional[Relation]:
            vec = _canonical([B[k][j] for k in range(n)])
            if vec is None or any(abs(m) >= coeff_cap for m in vec):
                return None
            res = _residual(vec, x)
            if res >= accept:
                return None
            mass = sum(abs(m).bit_length() for m in vec)
            res_floor = res + mp.mpf(2) ** (-wp)
            confidence = int(-mp.log(res_floor, 2)) - mass
            return Relation(vec, +res, confidence)

        # a vanished y may already be present after initial reduction
        for j in range(n):
            if abs(y[j]) < detect:
                rel = extract(j)
                if rel is not None:
                    return rel

        for _ in range(max_steps):
            m = max(
                range(n - 1),
                key=lambda i: mp.power(gamma, i + 1) * abs(H[i][i]),
            )
            y[m], y[m + 1] = y[m + 1], y[m]
            H[m], H[m + 1] = H[m + 1], H[m]
            for k in range(n):
                B[k][m], B[k][m + 1] = B[k][m + 1], B[k][m]
            if m <= n - 3:
                t0 = mp.sqrt(H[m][m] ** 2 + H[m][m + 1] ** 2)
                if t0 == 0:
                    break
                t1, t2 = H[m][m] / t0, H[m][m + 1] / t0
                for i in range(m, n):
                    t3, t4 = H[i][m], H[i][m + 1]
                    H[i][m] = t1 * t3 + t2 * t4
                    H[i][m + 1] = -t2 * t3 + t1 * t4
            for i in range(m + 1, n):
                reduce_row(i, min(i - 1, m + 1))
            best = min(range(n), key=lambda j: abs(y[j]))
            if abs(y[best]) < detect:
                rel = extract(best)
                if rel is not None:
                    return rel
            # lower bound on the norm of any remaining relation
            hmax = max(abs(H[j][j]) for j in range(n - 1))
            if hmax > 0 and 1 / hmax > coeff_cap:
                return None
    return None


def recognize(
    x: mp.mpf,
    basis: ConstantBasis,
    precision_bits: int,
    max_coeff_bits: int = 64,
) -> Optional[ClosedForm]:
    """Recognize x as a rational combination of the basis constants.

    Returns the ClosedForm solved for x, or None.  The soundness gate
    re-evaluates the relation with the constants at precision_bits + 64 and
    requires the residual to shrink by at least 2^32."""
    if precision_bits < 128:
        raise PrecisionTooLow("recognize requires precision_bits >= 128")
    if x == 0:
        return ClosedForm.zero()
    values = [x] + basis.values(precision_bits)
    rel = pslq(values, precision_bits, max_coeff_bits)
    if rel is None or rel.coefficients[0] == 0:
        return None
    with mp.workprec(precision_bits + 96):
        residual_base = _residual(rel.coefficients, values)
        hi_values = [x] + basis.values(precision_bits + 64)
        residual_hi = _residual(rel.coefficients, hi_values)
        floor = mp.mpf(2) ** (-(precision_bits + 88))
        shrunk = residual_hi <= max(residual_base * mp.mpf(2) ** (-32), floor)
    if not shrunk:
        return None
    m0 = rel.coefficients[0]
    pairs = [
        (entry.atom, Fraction(-mi, m0))
        for entry, mi in zip(basis.entries, rel.coefficients[1:])
        if mi
    ]
    return ClosedForm(pairs)
