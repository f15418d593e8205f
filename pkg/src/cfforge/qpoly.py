"""Dense univariate polynomials and rational functions over exact rationals.

Everything here is immutable value semantics: operations return new objects,
instances are safe to share between threads.  Coefficients are `fractions.
Fraction`; degrees stay small (tens) in this package, so dense arithmetic is
the right tool.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def _frac(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QPolynomial:
    """Polynomial with Fraction coefficients, stored low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("QPolynomial is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "QPolynomial":
        return cls(())

    @classmethod
    def one(cls) -> "QPolynomial":
        return cls((1,))

    @classmethod
    def constant(cls, c: Scalar) -> "QPolynomial":
        return cls((c,))

    @classmethod
    def x(cls) -> "QPolynomial":
        return cls((0, 1))

    @classmethod
    def linear(cls, shift: Scalar) -> "QPolynomial":
        """The monic factor (x + shift)."""
        return cls((shift, 1))

    # -- basic queries -----------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def constant_term(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return QPolynomial(out)

    def __neg__(self) -> "QPolynomial":
        return QPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "QPolynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return QPolynomial.zero()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return QPolynomial(out)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "QPolynomial":
        c = _frac(c)
        if c == 0:
            return QPolynomial.zero()
        return QPolynomial(c * a for a in self.coeffs)

    def __pow__(self, k: int) -> "QPolynomial":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = QPolynomial.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "QPolynomial") -> tuple["QPolynomial", "QPolynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return QPolynomial.zero(), self
        quo = [Fraction(0)] * (dq + 1)
        lead = other.leading
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / lead
            quo[k] = c
            if c:
                for i, oc in enumerate(other.coeffs):
                    rem[k + i] -= c * oc
        return QPolynomial(quo), QPolynomial(rem)

    def __floordiv__(self, other: "QPolynomial") -> "QPolynomial":
        return self.divmod(other)[0]

    def __mod__(self, other: "QPolynomial") -> "QPolynomial":
        return self.divmod(other)[1]

    def gcd(self, other: "QPolynomial") -> "QPolynomial":
        """Monic greatest common divisor."""
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    # -- structural operations ----------------------------------------------
    def monic(self) -> "QPolynomial":
        if self.is_zero:
            return self
        return self.scale(1 / self.leading)

    def primitive(self) -> tuple[Fraction, "QPolynomial"]:
        """Split into content * primitive-integer part with positive leading
        coefficient; returns (content, primitive)."""
        if self.is_zero:
            return Fraction(0), self
        den = math.lcm(*(c.denominator for c in self.coeffs))
        nums = [c.numerator * (den // c.denominator) for c in self.coeffs]
        g = math.gcd(*(abs(n) for n in nums))
        if nums[-1] < 0:
            g = -g
        content = Fraction(g, den)
        return content, QPolynomial(n // g for n in nums)

    def eval(self, x: Scalar) -> Fraction:
        x = _frac(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, a: Scalar) -> "QPolynomial":
        """Compose with x -> x + a."""
        a = _frac(a)
        if a == 0 or self.is_zero:
            return self
        # Horner on p(x+a): repeatedly multiply by (x+a) and add coefficients.
        out = QPolynomial.zero()
        xa = QPolynomial((a, 1))
        for c in reversed(self.coeffs):
            out = out * xa + QPolynomial.constant(c)
        return out

    def derivative(self) -> "QPolynomial":
        return QPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    # -- protocol -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, QPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero

    def __repr__(self) -> str:
        return f"QPolynomial({self})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "1" if k == 0 else ("n" if k == 1 else f"n^{k}")
            if k == 0:
                body = str(c)
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            if not parts:
                parts.append(body if c > 0 or k == 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)


class RationalFunction:
    """Reduced quotient of two QPolynomials with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: QPolynomial, den: QPolynomial = QPolynomial.one()):
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            num, den = QPolynomial.zero(), QPolynomial.one()
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead = den.leading
            if lead != 1:
                num, den = num.scale(1 / lead), den.scale(1 / lead)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def from_scalar(cls, c: Scalar) -> "RationalFunction":
        return cls(QPolynomial.constant(c))

    @classmethod
    def x(cls) -> "RationalFunction":
        return cls(QPolynomial.x())

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def as_polynomial(self) -> QPolynomial:
        if not self.is_polynomial:
            raise ValueError(f"{self!r} is not a polynomial")
        return self.num.scale(1 / self.den.constant_term)

    @property
    def degree(self) -> int:
        """Degree as n -> infinity: deg(num) - deg(den); zero maps to a
        large negative sentinel so comparisons behave."""
        if self.is_zero:
            return -(10**9)
        return self.num.degree - self.den.degree

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.num.scale(other), self.den)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num**k, self.den**k)

    def shift(self, a: Scalar) -> "RationalFunction":
        return RationalFunction(self.num.shift(a), self.den.shift(a))

    def eval(self, x: Scalar) -> Fraction:
        d = self.den.eval(x)
        if d == 0:
            from .errors import DivisionByZero

            raise DivisionByZero(str(self), at=x)
        return self.num.eval(x) / d

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalFunction)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction(({self.num}) / ({self.den}))"


def nullspace(rows: Sequence[Sequence[Scalar]], ncols: int) -> list[list[Fraction]]:
    """Exact nullspace basis of a rational matrix.

    Returns one basis vector per free column, in reduced (RREF-derived) form.
    """
    mat = [[_frac(c) for c in row] for row in rows if any(row)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            vec[pc] = -mat[row_idx][fc]
        basis.append(vec)
    return basis
