from fractions import Fraction

import mpmath as mp
import pytest

from cfforge import cfengine, telescope
from cfforge.closedform import (
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
from cfforge.errors import DegreeTooHigh, NonConvergent, Unsupported
from cfforge.qpoly import QPolynomial
from cfforge.telescope import (
    LinearFactor,
    NonLinearRemainder,
    PoleTerm,
    ShiftFactorization,
    factor_shifts,
    partial_fractions,
    sum_closed_form,
)

F = Fraction


def lin(shift, mult=1):
    return QPolynomial.linear(F(shift)) ** mult


class TestFactorShifts:
    def test_two_factor_example(self):
        p = lin(1, 3) * lin(2)
        fac = factor_shifts(p)
        assert isinstance(fac, ShiftFactorization)
        assert fac.unit == 1
        assert fac.factors == (LinearFactor(F(1), 3), LinearFactor(F(2), 1))
        assert fac.expand() == p

    def test_irreducible(self):
        res = factor_shifts(QPolynomial([1, 0, 1]))  # n^2 + 1
        assert isinstance(res, NonLinearRemainder)
        assert res.remainder == QPolynomial([1, 0, 1])

    def test_half_integer_shifts_with_unit(self):
        # 4 (n+1/2)(n+3/2)(n+1)^4, the f=n^4, g=2n+1 series denominator
        p = lin(F(1, 2)) * lin(F(3, 2)) * lin(1, 4) * 4
        fac = factor_shifts(p)
        assert isinstance(fac, ShiftFactorization)
        assert fac.unit == 4
        assert fac.factors == (
            LinearFactor(F(1, 2), 1),
            LinearFactor(F(1), 4),
            LinearFactor(F(3, 2), 1),
        )
        assert fac.expand() == p

    def test_mixed_linear_and_irreducible(self):
        p = lin(2) * QPolynomial([3, 0, 1])
        res = factor_shifts(p)
        assert isinstance(res, NonLinearRemainder)
        assert res.factors == (LinearFactor(F(2), 1),)
        assert res.remainder.monic() == QPolynomial([3, 0, 1])

    def test_zero_shift(self):
        fac = factor_shifts(QPolynomial([0, 0, 2]))  # 2 n^2
        assert fac.unit == 2
        assert fac.factors == (LinearFactor(F(0), 2),)


class TestPartialFractions:
    def recombine(self, terms, den):
        total = QPolynomial.zero()
        for t in terms:
            rest = den // (QPolynomial.linear(t.shift) ** t.power)
            total = total + rest.scale(t.coefficient)
        return total

    def test_quartic_plus_simple(self):
        # 1 / ((n+1)^4 (n+2)): alternating-sign ladder plus 1/(n+2)
        factors = [LinearFactor(F(1), 4), LinearFactor(F(2), 1)]
        terms = partial_fractions(QPolynomial.one(), factors)
        got = {(t.shift, t.power): t.coefficient for t in terms}
        assert got == {
            (F(1), 4): F(1),
            (F(1), 3): F(-1),
            (F(1), 2): F(1),
            (F(1), 1): F(-1),
            (F(2), 1): F(1),
        }
        den = lin(1, 4) * lin(2)
        assert self.recombine(terms, den) == QPolynomial.one()

    def test_two_simple_poles(self):
        factors = [LinearFactor(F(1), 1), LinearFactor(F(2), 1)]
        terms = partial_fractions(QPolynomial.one(), factors)
        got = {(t.shift, t.power): t.coefficient for t in terms}
        assert got == {(F(1), 1): F(1), (F(2), 1): F(-1)}

    def test_identity_case(self):
        factors = [LinearFactor(F(1), 2)]
        terms = partial_fractions(QPolynomial.one(), factors)
        assert terms == [PoleTerm(F(1), F(1), 2)]

    def test_degree_too_high(self):
        with pytest.raises(DegreeTooHigh):
            partial_fractions(QPolynomial([0, 0, 1]), [LinearFactor(F(1), 2)])

    def test_general_numerator_recombines(self):
        factors = [
            LinearFactor(F(1, 2), 1),
            LinearFactor(F(1), 3),
            LinearFactor(F(3), 2),
        ]
        num = QPolynomial([2, -1, 5, 0, 1])
        terms = partial_fractions(num, factors)
        den = lin(F(1, 2)) * lin(1, 3) * lin(3, 2)
        assert self.recombine(terms, den) == num


class TestSumClosedForm:
    def test_quartic_ladder(self):
        # sum of 1/((n+1)^4 (n+2)) = zeta(4) - zeta(3) + zeta(2) - 1
        factors = [LinearFactor(F(1), 4), LinearFactor(F(2), 1)]
        cf = sum_closed_form(partial_fractions(QPolynomial.one(), factors))
        assert cf == ClosedForm(
            [(Zeta(4), 1), (Zeta(3), -1), (Zeta(2), 1), (ONE, -1)]
        )

    def test_cubic_ladder(self):
        factors = [LinearFactor(F(1), 3), LinearFactor(F(2), 1)]
        cf = sum_closed_form(partial_fractions(QPolynomial.one(), factors))
        assert cf == ClosedForm([(Zeta(3), 1), (Zeta(2), -1), (ONE, 1)])

    def test_pure_telescope(self):
        terms = [PoleTerm(F(1), F(1), 1), PoleTerm(F(-1), F(2), 1)]
        assert sum_closed_form(terms) == ClosedForm.rational(1)

    def test_nonconvergent_rejected(self):
        with pytest.raises(NonConvergent):
            sum_closed_form([PoleTerm(F(1), F(1), 1)])

    def test_nonpositive_shift_peel_off(self):
        # sum 1/((n+1/2)(n+3/2)) shifted down: terms at shifts -1/2 and 1/2
        terms = [PoleTerm(F(1), F(-1, 2), 1), PoleTerm(F(-1), F(1, 2), 1)]
        cf = sum_closed_form(terms)
        # telescoping: sum over n>=0 of (1/(n-1/2) - 1/(n+1/2)) = 1/(-1/2) = -2
        assert cf == ClosedForm.rational(-2)

    def test_numeric_agreement(self):
        terms = [
            PoleTerm(F(3), F(1, 3), 2),
            PoleTerm(F(1), F(1), 1),
            PoleTerm(F(-1), F(5, 2), 1),
        ]
        cf = sum_closed_form(terms)
        with mp.workprec(160):
            direct = mp.mpf(0)
            for n in range(200000):
                direct += (
                    mp.mpf(3) / (n + mp.mpf(1) / 3) ** 2
                    + 1 / (n + mp.mpf(1))
                    - 1 / (n + mp.mpf(5) / 2)
                )
            val = eval_closed_form(cf, 140)
            # direct summation converges like 1/N here
            assert abs(val - direct) < mp.mpf(1) / 10000


SPEC_FORMS = {
    # fixture -> exact coefficient map of the derived closed form
    ("n^4", "2*n+1"): ClosedForm([(ONE, 8), (Zeta(2), -4), (Zeta(4), -1)]),
    ("n^2", "n+1"): ClosedForm([(Zeta(3), 1), (Zeta(2), -1), (ONE, 1)]),
    ("n^3", "n+1"): ClosedForm(
        [(Zeta(4), 1), (Zeta(3), -1), (Zeta(2), 1), (ONE, -1)]
    ),
    ("n^7", "n+1"): ClosedForm(
        [
            (Zeta(8), 1),
            (Zeta(7), -1),
            (Zeta(6), 1),
            (Zeta(5), -1),
            (Zeta(4), 1),
            (Zeta(3), -1),
            (Zeta(2), 1),
            (ONE, -1),
        ]
    ),
    ("n*(2*n+1)", "n+1"): ClosedForm([(Zeta(2), 1), (ONE, -7), (LogPrime(2), 8)]),
}


class TestClosedFormFor:
    @pytest.mark.parametrize("fg,expected", sorted(SPEC_FORMS.items()))
    def test_exact_forms(self, fg, expected):
        spec = cfengine.make_spec(*fg)
        assert telescope.closed_form_for(spec) == expected

    def test_digamma_form(self):
        spec = cfengine.make_spec("n*(3*n+1)", "n+1")
        cf = telescope.closed_form_for(spec)
        assert cf == ClosedForm(
            [
                (ONE, -13),
                (Zeta(2), 1),
                (EULER_GAMMA, F(-9, 2)),
                (Digamma(F(1, 3)), F(-9, 2)),
            ]
        )

    def test_unsupported_surd(self):
        spec = cfengine.make_spec("n^2", "1+sqrt(2)*(n^2+n)")
        with pytest.raises(Unsupported):
            telescope.closed_form_for(spec)

    def test_unsupported_irreducible(self):
        spec = cfengine.make_spec("n*(n^2+2)", "n+2")
        with pytest.raises(Unsupported):
            telescope.closed_form_for(spec)

    def test_oracle_equivalence(self):
        # derived forms match the independent numeric summation
        for fg in SPEC_FORMS:
            spec = cfengine.make_spec(*fg)
            cf = telescope.closed_form_for(spec)
            series = cfengine.sum_series(spec, precision_bits=110)
            val = eval_closed_form(cf, 150)
            assert abs(val - series.value) < series.error_estimate + mp.mpf(2) ** -108

    def test_prefix_consistency(self):
        # exact partial sum + tail closed form == full closed form
        for fg in (("n^4", "2*n+1"), ("n^3", "n+1"), ("n*(2*n+1)", "n+1")):
            spec = cfengine.make_spec(*fg)
            full = telescope.closed_form_for(spec)
            for N in (0, 1, 5):
                head = cfengine.partial_sum(spec, N)
                tail = telescope.tail_closed_form(spec, N + 1)
                assert tail + ClosedForm.rational(head) == full


class TestRenderEval:
    def test_zero_form(self):
        assert render_closed_form(ClosedForm.zero()) == ""
        assert eval_closed_form(ClosedForm.zero(), 128) == 0

    def test_pi_style(self):
        cf = ClosedForm([(ONE, 8), (Zeta(2), -4), (Zeta(4), -1)])
        assert render_closed_form(cf, style="pi") == "8 - 2/3*pi^2 - 1/90*pi^4"
        assert render_closed_form(cf) == "8 - 4*zeta(2) - zeta(4)"

    def test_eval_value(self):
        cf = ClosedForm([(Zeta(3), 1), (Zeta(2), -1), (ONE, 1)])
        v = eval_closed_form(cf, 170)
        with mp.workprec(200):
            assert mp.nstr(v, 10).startswith("0.5571228")

    def test_hurwitz_atom_roundtrip(self):
        cf = ClosedForm([(Hurwitz(2, F(1, 4)), F(3, 7))])
        v = eval_closed_form(cf, 150)
        with mp.workprec(190):
            ref = F(3, 7) * mp.zeta(2, mp.mpf(1) / 4)
            assert abs(v - mp.mpf(ref)) < mp.mpf(2) ** -145
