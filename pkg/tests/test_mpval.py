import random
from fractions import Fraction

import mpmath as mp
import pytest

from cfforge import mpval
from cfforge.errors import DomainError

# Reference digit strings (50 decimal places).  These are cross-checked
# below against two independent in-repo algorithms each, so the suite does
# not depend on any external ground truth.
PI_50 = "3.14159265358979323846264338327950288419716939937510"
GAMMA_50 = "0.57721566490153286060651209008240243104215933593992"
CATALAN_50 = "0.91596559417721901505460351493238411077414937428167"
ZETA3_50 = "1.20205690315959428539973816151144999076498629234049"


def bits_close(a, b, bits):
    with mp.workprec(max(bits + 64, 128)):
        return abs(mp.mpf(a) - mp.mpf(b)) < mp.mpf(2) ** (-bits)


class TestDualAlgorithms:
    def test_pi_agm_vs_machin(self):
        assert bits_close(mpval.pi_agm(170), mpval.pi_machin(170), 166)

    def test_gamma_bessel_vs_euler_maclaurin(self):
        assert bits_close(
            mpval.gamma_brent_mcmillan(170), mpval.gamma_harmonic(170), 166
        )

    def test_zeta3_borwein_vs_euler_maclaurin(self):
        assert bits_close(
            mpval.zeta_borwein(3, 170), mpval.zeta_euler_maclaurin(3, 170), 166
        )

    def test_catalan_binomial_vs_beta(self):
        assert bits_close(
            mpval.catalan_central_binomial(170), mpval.catalan_beta(170), 166
        )


class TestReferenceDigits:
    @pytest.mark.parametrize(
        "fn,digits",
        [
            (mpval.const_pi, PI_50),
            (mpval.const_gamma, GAMMA_50),
            (mpval.const_catalan, CATALAN_50),
            (lambda b: mpval.zeta_int(3, b), ZETA3_50),
        ],
    )
    def test_constants_match_reference(self, fn, digits):
        with mp.workprec(220):
            assert abs(fn(180) - mp.mpf(digits)) < mp.mpf(10) ** -49


class TestZeta:
    def test_zeta2_is_pi_squared_over_six(self):
        with mp.workprec(200):
            pi = mpval.const_pi(200)
            assert bits_close(mpval.zeta_int(2, 170), pi * pi / 6, 165)

    def test_zeta4_is_pi4_over_90(self):
        with mp.workprec(200):
            pi = mpval.const_pi(200)
            assert bits_close(mpval.zeta_int(4, 170), pi**4 / 90, 165)

    def test_even_zeta_bernoulli_multiples(self):
        # zeta(2k) equals the exact Bernoulli rational times pi^(2k), k <= 6
        with mp.workprec(220):
            pi = mpval.const_pi(220)
            for k in range(1, 7):
                coeff = mpval.zeta_even_coeff(k)
                expected = mpval.mpf_from_fraction(coeff) * pi ** (2 * k)
                assert bits_close(mpval.zeta_int(2 * k, 180), expected, 172)

    def test_rejects_small_k(self):
        with pytest.raises(ValueError):
            mpval.zeta_int(1, 128)


class TestBernoulli:
    def test_known_values(self):
        known = {
            0: Fraction(1),
            1: Fraction(-1, 2),
            2: Fraction(1, 6),
            4: Fraction(-1, 30),
            6: Fraction(1, 42),
            8: Fraction(-1, 30),
            10: Fraction(5, 66),
            12: Fraction(-691, 2730),
            3: Fraction(0),
        }
        for m, v in known.items():
            assert mpval.bernoulli(m) == v


class TestHurwitzDigamma:
    def test_hurwitz_half_reduction(self):
        # zeta(s, 1/2) = (2^s - 1) zeta(s)
        with mp.workprec(220):
            for s in (2, 3, 5):
                lhs = mpval.hurwitz_zeta_int(s, Fraction(1, 2), 170)
                rhs = (2**s - 1) * mpval.zeta_int(s, 200)
                assert bits_close(lhs, rhs, 164)

    def test_hurwitz_recurrence(self):
        # zeta(s, a) = zeta(s, a+1) + a^-s
        a = Fraction(1, 3)
        with mp.workprec(220):
            lhs = mpval.hurwitz_zeta_int(3, a, 180)
            rhs = mpval.hurwitz_zeta_int(3, a + 1, 180) + mp.mpf(27)
            assert bits_close(lhs, rhs, 172)

    def test_digamma_one_and_half(self):
        with mp.workprec(220):
            gamma = mpval.const_gamma(200)
            log2 = mpval.log_rational(2, 200)
            assert bits_close(mpval.digamma_rational(1, 180), -gamma, 172)
            assert bits_close(
                mpval.digamma_rational(Fraction(1, 2), 180), -gamma - 2 * log2, 172
            )

    def test_digamma_recurrence(self):
        # psi(x+1) = psi(x) + 1/x
        x = Fraction(2, 7)
        with mp.workprec(220):
            lhs = mpval.digamma_rational(x + 1, 180)
            rhs = mpval.digamma_rational(x, 180) + mp.mpf(7) / 2
            assert bits_close(lhs, rhs, 172)


class TestLogRational:
    def test_zero_at_one(self):
        assert mpval.log_rational(1, 128) == 0

    def test_power_law(self):
        with mp.workprec(200):
            assert bits_close(
                mpval.log_rational(256, 170), 8 * mpval.log_rational(2, 200), 164
            )

    def test_additivity(self):
        with mp.workprec(200):
            lhs = mpval.log_rational(6, 170)
            rhs = mpval.log_rational(2, 200) + mpval.log_rational(3, 200)
            assert bits_close(lhs, rhs, 164)

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            mpval.log_rational(Fraction(-1, 2), 128)
        with pytest.raises(DomainError):
            mpval.log_rational(0, 128)


class TestElem:
    def test_log_one(self):
        assert mpval.elem("log", mp.mpf(1), 128) == 0

    def test_inverse_pairs(self):
        rng = random.Random(17)
        with mp.workprec(200):
            for _ in range(100):
                x = mp.mpf(rng.randrange(1, 1000)) / 1024  # in (0, 1)
                t = mpval.elem("tanh", mpval.elem("atanh", x, 170), 170)
                e = mpval.elem("log", mpval.elem("exp", x, 170), 170)
                assert abs(t - x) < 4 * mp.mpf(2) ** -166
                assert abs(e - x) < 4 * mp.mpf(2) ** -166

    def test_coth_value(self):
        # coth(sqrt(2) pi) used by the v(v^2+2), v+2 fixture
        with mp.workprec(200):
            x = mp.sqrt(mp.mpf(2)) * mpval.const_pi(200)
            v = mpval.elem("coth", x, 170)
            assert bits_close(v, (mp.exp(2 * x) + 1) / (mp.exp(2 * x) - 1), 164)

    def test_domain_errors(self):
        for fn, x in (("log", -1), ("sqrt", -2), ("atanh", 2), ("coth", 0)):
            with pytest.raises(DomainError):
                mpval.elem(fn, mp.mpf(x), 128)

    def test_unknown_function(self):
        with pytest.raises(ValueError):
            mpval.elem("sinh", mp.mpf(1), 128)


class TestSelfConsistency:
    @pytest.mark.parametrize(
        "fn",
        [
            mpval.const_pi,
            mpval.const_gamma,
            mpval.const_catalan,
            lambda b: mpval.zeta_int(5, b),
            lambda b: mpval.hurwitz_zeta_int(2, Fraction(1, 4), b),
            lambda b: mpval.digamma_rational(Fraction(1, 3), b),
        ],
    )
    def test_doubling_precision_is_stable(self, fn):
        lo, hi = fn(128), fn(256)
        assert bits_close(lo, hi, 126)

    def test_precision_floor(self):
        with pytest.raises(ValueError):
            mpval.const_pi(32)
