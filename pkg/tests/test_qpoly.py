import random
from fractions import Fraction

import pytest

from cfforge.qpoly import QPolynomial, RationalFunction, nullspace


def P(*coeffs):
    return QPolynomial(coeffs)


def rand_poly(rng, max_deg=5):
    deg = rng.randrange(max_deg + 1)
    return QPolynomial(
        [Fraction(rng.randrange(-9, 10), rng.randrange(1, 7)) for _ in range(deg + 1)]
    )


class TestQPolynomial:
    def test_degree_and_zero(self):
        assert QPolynomial.zero().degree == -1
        assert QPolynomial.zero().is_zero
        assert P(0, 0, 3).degree == 2
        assert P(1, 2, 0, 0) == P(1, 2)

    def test_arithmetic(self):
        a, b = P(1, 2), P(3, 0, 1)  # 1+2n, 3+n^2
        assert a + b == P(4, 2, 1)
        assert a - a == QPolynomial.zero()
        assert a * b == P(3, 6, 1, 2)
        assert a.scale(Fraction(1, 2)) == P(Fraction(1, 2), 1)
        assert (a**3) == a * a * a

    def test_divmod_roundtrip(self):
        rng = random.Random(7)
        for _ in range(200):
            a = rand_poly(rng)
            b = rand_poly(rng)
            if b.is_zero:
                continue
            q, r = a.divmod(b)
            assert q * b + r == a
            assert r.is_zero or r.degree < b.degree

    def test_gcd_monic(self):
        common = P(1, 1)  # n+1
        a = common * P(2, 3)
        b = common * P(-1, 0, 1)
        g = a.gcd(b)
        assert g == common  # already monic
        assert a.gcd(QPolynomial.zero()) == a.monic()

    def test_eval_and_shift(self):
        p = P(1, -2, 1)  # (n-1)^2
        assert p.eval(1) == 0
        assert p.eval(Fraction(1, 2)) == Fraction(1, 4)
        assert p.shift(1) == P(0, 0, 1)  # (n+1-1)^2 = n^2
        rng = random.Random(3)
        for _ in range(50):
            q = rand_poly(rng)
            a = Fraction(rng.randrange(-5, 6), rng.randrange(1, 4))
            x = Fraction(rng.randrange(-5, 6))
            assert q.shift(a).eval(x) == q.eval(x + a)

    def test_primitive(self):
        p = P(Fraction(2, 3), Fraction(4, 3))
        content, prim = p.primitive()
        assert prim == P(1, 2)
        assert prim.scale(content) == p
        # negative leading flips into the content
        content2, prim2 = P(2, -4).primitive()
        assert prim2.leading > 0 and prim2.scale(content2) == P(2, -4)

    def test_derivative(self):
        assert P(5, 1, 3).derivative() == P(1, 6)


class TestRationalFunction:
    def test_normalization(self):
        r = RationalFunction(P(0, 2), P(0, 0, 2))  # 2n / 2n^2
        assert r.num == P(1) and r.den == P(0, 1)
        assert RationalFunction(P(1), P(0, 2)).den.leading == 1  # monic denominator

    def test_arithmetic_matches_eval(self):
        rng = random.Random(11)
        for _ in range(100):
            a = RationalFunction(rand_poly(rng), P(1, 1))
            b = RationalFunction(rand_poly(rng), P(2, 0, 1))
            x = Fraction(rng.randrange(0, 20))
            s = a + b
            m = a * b
            assert s.eval(x) == a.eval(x) + b.eval(x)
            assert m.eval(x) == a.eval(x) * b.eval(x)

    def test_pow_and_inverse(self):
        r = RationalFunction(P(0, 1), P(1, 1))  # n/(n+1)
        assert (r**-2).eval(2) == Fraction(9, 4)
        assert r.inverse().eval(3) == Fraction(4, 3)

    def test_polynomial_detection(self):
        r = RationalFunction(P(0, 0, 1), P(0, 1))  # n^2/n
        assert r.is_polynomial
        assert r.as_polynomial() == P(0, 1)

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisionError):
            RationalFunction(P(1), QPolynomial.zero())


class TestNullspace:
    def test_simple_kernel(self):
        # x + y = 0 has kernel spanned by (1, -1)
        basis = nullspace([[1, 1]], 2)
        assert len(basis) == 1
        v = basis[0]
        assert v[0] + v[1] == 0 and any(v)

    def test_full_rank(self):
        assert nullspace([[1, 0], [0, 1]], 2) == []

    def test_members_are_solutions(self):
        rng = random.Random(5)
        for _ in range(50):
            rows = [
                [Fraction(rng.randrange(-3, 4)) for _ in range(5)] for _ in range(3)
            ]
            for v in nullspace(rows, 5):
                for row in rows:
                    assert sum(c * x for c, x in zip(row, v)) == 0
