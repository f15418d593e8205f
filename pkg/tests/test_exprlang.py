import random
from fractions import Fraction

import mpmath as mp
import pytest

from cfforge import exprlang as el
from cfforge.errors import (
    DivisionByZero,
    ExprSyntaxError,
    NotExact,
    NotRational,
    UnknownIdentifierError,
)


class TestParse:
    def test_single_power(self):
        assert el.parse("n^4") == el.Pow(el.VAR, 4)

    def test_exp_times_power(self):
        # E^(-8-2z) z^3 from the example list
        e = el.parse("exp(-2*n-8)*n^3")
        assert isinstance(e, el.Mul)
        assert isinstance(e.left, el.Func) and e.left.name == "exp"
        assert e.right == el.Pow(el.VAR, 3)

    def test_constant_expression(self):
        e = el.parse("zeta(3)-pi^2/6+1")
        assert el.is_constant(e)

    def test_variable_aliases(self):
        assert el.parse("z^2") == el.parse("v^2") == el.parse("n^2")

    def test_rational_literal_folds(self):
        assert el.parse("1/2") == el.RatLit(Fraction(1, 2))
        assert el.parse("6/3") == el.IntLit(2)
        assert el.parse("-1/2") == el.RatLit(Fraction(-1, 2))

    def test_negative_literal_folds(self):
        assert el.parse("-3") == el.IntLit(-3)
        # ^ binds tighter than unary minus
        assert el.parse("-3^2") == el.Neg(el.Pow(el.IntLit(3), 2))

    def test_precedence(self):
        assert el.parse("1+2*3") == el.Add(
            el.IntLit(1), el.Mul(el.IntLit(2), el.IntLit(3))
        )
        assert el.parse("(1+2)*3") == el.Mul(
            el.Add(el.IntLit(1), el.IntLit(2)), el.IntLit(3)
        )
        # left associativity
        assert el.parse("1-2-3") == el.Sub(
            el.Sub(el.IntLit(1), el.IntLit(2)), el.IntLit(3)
        )

    def test_negative_exponent(self):
        assert el.parse("n^-2") == el.Pow(el.VAR, -2)
        assert el.parse("n^(-2)") == el.Pow(el.VAR, -2)

    def test_syntax_error_offset(self):
        with pytest.raises(ExprSyntaxError) as exc:
            el.parse("1+*2")
        assert exc.value.offset == 2

    def test_decimal_rejected(self):
        with pytest.raises(ExprSyntaxError):
            el.parse("1.5*n")

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError):
            el.parse("foo(3)")
        with pytest.raises(UnknownIdentifierError):
            el.parse("x+1")

    def test_zeta_argument_validation(self):
        assert el.parse("zeta(3)") == el.Zeta(3)
        for bad in ("zeta(1)", "zeta(n)", "zeta(1/2)"):
            with pytest.raises(ExprSyntaxError):
                el.parse(bad)

    def test_empty_and_nonascii(self):
        with pytest.raises(ExprSyntaxError):
            el.parse("   ")
        with pytest.raises(ExprSyntaxError):
            el.parse("n²")


class TestNormalizeRender:
    def test_render_examples(self):
        assert el.render(el.Pow(el.VAR, 4)) == "n^4"
        assert el.render(el.parse("2*n+1")) == "2*n+1"
        assert el.render(el.parse("(1+2*3)")) == "7"

    def test_normalize_idempotent(self):
        for text in ("2*n+1", "(1+2*3)*n", "-(-n)", "n/3/2", "sqrt(8/2)"):
            e = el.normalize(el.parse(text))
            assert el.normalize(e) == e

    def test_double_negation(self):
        assert el.normalize(el.parse("-(-n)")) == el.VAR

    def test_division_by_zero_not_folded(self):
        e = el.normalize(el.parse("1/(2-2)"))
        assert isinstance(e, el.Div)


def random_expr(rng: random.Random, depth: int) -> el.Expr:
    if depth == 0:
        return rng.choice(
            [
                el.IntLit(rng.randrange(-20, 21)),
                el.RatLit(Fraction(rng.randrange(-9, 10), rng.randrange(1, 10))),
                el.VAR,
                el.NamedConst(rng.choice(["pi", "gamma", "catalan", "e"])),
                el.Zeta(rng.randrange(2, 9)),
            ]
        )
    kind = rng.randrange(8)
    if kind < 4:
        ctor = (el.Add, el.Sub, el.Mul, el.Div)[kind]
        return ctor(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if kind == 4:
        return el.Neg(random_expr(rng, depth - 1))
    if kind == 5:
        return el.Pow(random_expr(rng, depth - 1), rng.randrange(-3, 7))
    if kind == 6:
        return el.Func(
            rng.choice(sorted(el.FUNCTIONS)), random_expr(rng, depth - 1)
        )
    return random_expr(rng, depth - 1)


class TestRoundTrip:
    def test_random_ast_corpus(self):
        # parse(render(e)) == normalize(e) and parse . render . parse == parse
        rng = random.Random(20240817)
        for i in range(1000):
            e = random_expr(rng, rng.randrange(1, 5))
            text = el.render(e)
            parsed = el.parse(text)
            assert parsed == el.normalize(e), text
            assert el.parse(el.render(parsed)) == parsed, text


class TestEvalRational:
    def test_simple(self):
        assert el.eval_rational(el.parse("n^2"), 3) == 9

    def test_b_n_two_forms_agree(self):
        # b_n of f=n^4, g=2n+1 at n=1: both the quotient form and the
        # expanded Theorem polynomial give 27 = 1 + 2^4 + 2*(1+4)
        quotient = el.parse(
            "((n+1)^4*(2*(n+1)+1) + n^4*(2*(n-1)+1)) / (2*n+1)"
        )
        expanded = el.parse("n^4+(n+1)^4+2*(n^2+(n+1)^2)")
        assert el.eval_rational(quotient, 1) == 27
        assert el.eval_rational(expanded, 1) == 27
        for n in range(0, 12):
            assert el.eval_rational(quotient, n) == el.eval_rational(expanded, n)

    def test_surd_not_exact(self):
        with pytest.raises(NotExact):
            el.eval_rational(el.parse("sqrt(2)*(n^2+n)+1"), 1)
        # perfect squares stay exact
        assert el.eval_rational(el.parse("sqrt(4)*n"), 3) == 6

    def test_division_by_zero_names_subterm(self):
        with pytest.raises(DivisionByZero) as exc:
            el.eval_rational(el.parse("1/(n-3)"), 3)
        assert "n-3" in str(exc.value)

    def test_exact_special_values(self):
        assert el.eval_rational(el.parse("exp(0)+log(1)+tanh(0)"), 0) == 1
        with pytest.raises(DivisionByZero):
            el.eval_rational(el.parse("coth(n)"), 0)


class TestEvalFloat:
    def test_pi_squared_over_six_is_zeta2(self):
        from cfforge import mpval

        v = el.eval_float(el.parse("pi^2/6"), None, 200)
        assert abs(v - mpval.zeta_int(2, 232)) < mp.mpf(2) ** -198

    def test_e9_zeta3(self):
        from cfforge import mpval

        v = el.eval_float(el.parse("exp(9)*zeta(3)"), None, 160)
        with mp.workprec(200):
            ref = mp.exp(mp.mpf(9)) * mpval.zeta_euler_maclaurin(3, 200)
            assert abs(v - ref) < mp.mpf(2) ** -150
            assert mp.nstr(v, 20).startswith("9740.367972023548")

    def test_variable_value(self):
        assert el.eval_float(el.parse("n+1"), 0, 64) == 1.0

    def test_agreement_with_exact(self):
        rng = random.Random(99)
        exprs = ["(n^2+1)/(2*n+3)", "n^3-7*n+2/5", "(n+1)^4/(n^2+1)"]
        for text in exprs:
            e = el.parse(text)
            for _ in range(20):
                n = rng.randrange(0, 101)
                exact = el.eval_rational(e, n)
                approx = el.eval_float(e, n, 128)
                with mp.workprec(200):
                    err = abs(approx - mp.mpf(exact.numerator) / exact.denominator)
                    assert err < mp.mpf(2) ** -(128 - 32)

    def test_domain_errors(self):
        from cfforge.errors import DomainError

        with pytest.raises(DomainError):
            el.eval_float(el.parse("log(0-1)"), None, 64)
        with pytest.raises(DomainError):
            el.eval_float(el.parse("atanh(2)"), None, 64)


class TestAsRationalFunction:
    def test_examples(self):
        r = el.as_rational_function(el.parse("n^4"))
        assert r.is_polynomial and r.num.degree == 4
        r2 = el.as_rational_function(el.parse("n^4/(n+2)"))
        assert r2.num.degree == 4 and r2.den.degree == 1
        with pytest.raises(NotRational):
            el.as_rational_function(el.parse("exp(n)"))

    def test_matches_eval_rational(self):
        for text in ("n^4/(n+2)", "(2*n+1)*(n-1/2)", "1/(n+1)+1/(n+2)"):
            e = el.parse(text)
            r = el.as_rational_function(e)
            for n in range(0, 21):
                assert r.eval(n) == el.eval_rational(e, n)


class TestHelpers:
    def test_shift_var(self):
        e = el.parse("n^2+1")
        assert el.eval_rational(el.shift_var(e, 1), 2) == 10
        assert el.eval_rational(el.shift_var(e, -1), 2) == 2

    def test_expr_from_polynomial_roundtrip(self):
        from cfforge.qpoly import QPolynomial

        p = QPolynomial([Fraction(1, 2), -2, 0, 3])
        e = el.expr_from_polynomial(p)
        assert el.as_rational_function(e).as_polynomial() == p
