"""Arbitrary-precision numerics: constants, zeta values, elementary functions.

Values are mpmath binary floats; every public function takes an explicit
precision in bits and returns a result with absolute (for constants) or
relative (for elementary functions) error below ``2**-precision_bits``.
Pipeline work internally carries 32 guard bits and rounds once at the end.

The fundamental constants are computed by algorithms implemented here, each
with a second, independent in-repo algorithm used by the self-check suite:

* pi       — Gauss-Legendre AGM iteration / Machin arctangent series
* gamma    — Brent-McMillan Bessel quotient / harmonic Euler-Maclaurin
* zeta(k)  — Borwein alternating-series acceleration / Euler-Maclaurin
* catalan  — central-binomial series / Dirichlet-beta Hurwitz difference

A process-wide cache keyed by (name, precision) backs the ``const_*`` and
``zeta_int`` entry points since the same values recur across fixtures; the
cache is safe for concurrent use.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, Union

import mpmath as mp

from .errors import DomainError

GUARD_BITS = 32

_cache: dict[tuple, mp.mpf] = {}
_cache_lock = threading.Lock()


def _cached(key: tuple, compute: Callable[[], mp.mpf]) -> mp.mpf:
    with _cache_lock:
        if key in _cache:
            return _cache[key]
    value = compute()
    with _cache_lock:
        _cache.setdefault(key, value)
    return value


def _round_to(value: mp.mpf, bits: int) -> mp.mpf:
    with mp.workprec(bits):
        return +value


def mpf_from_fraction(x: Union[int, Fraction]) -> mp.mpf:
    x = Fraction(x)
    return mp.mpf(x.numerator) / x.denominator


# --------------------------------------------------------------------------
# Bernoulli numbers (exact rationals)
# --------------------------------------------------------------------------

_bernoulli: list[Fraction] = [Fraction(1), Fraction(-1, 2)]
_bernoulli_lock = threading.Lock()


def bernoulli(m: int) -> Fraction:
    """Exact Bernoulli number B_m (B_1 = -1/2 convention)."""
    if m < 0:
        raise ValueError("Bernoulli index must be >= 0")
    with _bernoulli_lock:
        while len(_bernoulli) <= m:
            k = len(_bernoulli)
            if k % 2 == 1:
                _bernoulli.append(Fraction(0))
                continue
            acc = Fraction(0)
            for j in range(k):
                acc += math.comb(k + 1, j) * _bernoulli[j]
            _bernoulli.append(-acc / (k + 1))
        return _bernoulli[m]


def zeta_even_coeff(k: int) -> Fraction:
    """The exact rational c with zeta(2k) == c * pi^(2k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sign = 1 if k % 2 == 1 else -1
    return sign * bernoulli(2 * k) * Fraction(2 ** (2 * k - 1), math.factorial(2 * k))


# --------------------------------------------------------------------------
# pi
# --------------------------------------------------------------------------


def pi_agm(precision_bits: int) -> mp.mpf:
    """pi by the Gauss-Legendre (AGM) iteration; quadratic convergence."""
    wp = precision_bits + GUARD_BITS
    with mp.workprec(wp):
        a = mp.mpf(1)
        b = 1 / mp.sqrt(mp.mpf(2))
        t = mp.mpf(1) / 4
        p = 1
        stop = mp.mpf(2) ** (-(wp // 2 + 4))
        while abs(a - b) > stop:
            an = (a + b) / 2
            b = mp.sqrt(a * b)
            t -= p * (a - an) ** 2
            a = an
            p <<= 1
        value = (a + b) ** 2 / (4 * t)
    return _round_to(value, precision_bits)


def _atan_recip_fixed(m: int, wp: int) -> int:
    """floor(atan(1/m) * 2^wp) up to a few final ulps, in pure integers."""
    one = 1 << wp
    u = one // m
    total = u
    m2 = m * m
    k = 1
    while u:
        u //= m2
        term = u // (2 * k + 1)
        if term == 0:
            break
        total += -term if k % 2 else term
        k += 1
    return total


def pi_machin(precision_bits: int) -> mp.mpf:
    """pi = 16*atan(1/5) - 4*atan(1/239), fixed-point integer series."""
    wp = precision_bits + GUARD_BITS + 16
    fixed = 16 * _atan_recip_fixed(5, wp) - 4 * _atan_recip_fixed(239, wp)
    with mp.workprec(wp + 8):
        value = mp.ldexp(mp.mpf(fixed), -wp)
    return _round_to(value, precision_bits)


def const_pi(precision_bits: int) -> mp.mpf:
    _check_bits(precision_bits)
    return _cached(("pi", precision_bits), lambda: pi_agm(precision_bits))


# --------------------------------------------------------------------------
# Euler's gamma
# --------------------------------------------------------------------------


def gamma_brent_mcmillan(precision_bits: int) -> mp.mpf:
    """gamma via the Bessel-function quotient S0(2n)/I0(2n) - log n.

    The quotient approaches gamma + log n with error on the order of
    exp(-4n), so n is sized at ln(2)/4 bits."""
    wp = precision_bits + GUARD_BITS + 16
    with mp.workprec(wp):
        n = int(wp * 0.1733) + 4
        n2 = n * n
        b = mp.mpf(1)  # (n^k / k!)^2
        h = mp.mpf(0)  # H_k
        num = mp.mpf(0)
        den = mp.mpf(1)
        thresh = mp.mpf(2) ** (-(wp + 10))
        k = 1
        while True:
            b = b * n2 / (k * k)
            h += mp.mpf(1) / k
            num += b * h
            den += b
            if k > n and b < thresh * den:
                break
            k += 1
        value = num / den - mp.log(n)
    return _round_to(value, precision_bits)


def gamma_harmonic(precision_bits: int) -> mp.mpf:
    """gamma = H_N - log N - 1/(2N) + sum B_2k/(2k N^2k), Euler-Maclaurin."""
    wp = precision_bits + GUARD_BITS + 16
    for attempt in range(5):
        with mp.workprec(wp):
            n = (int(wp * 0.1104) + 12) << attempt
            value = -mp.log(n) - mp.mpf(1) / (2 * n)
            h = mp.mpf(0)
            for k in range(1, n + 1):
                h += mp.mpf(1) / k
            value += h
            correction = _em_tail_sum(
                x_pow_start=mp.mpf(n) ** -2,
                x_inv_sq=mp.mpf(n) ** -2,
                coeff=lambda k: bernoulli(2 * k) / (2 * k),
                wp=wp,
            )
            if correction is not None:
                return _round_to(value + correction, precision_bits)
    raise RuntimeError("Euler-Maclaurin failed to converge for gamma")


def _em_tail_sum(x_pow_start, x_inv_sq, coeff, wp) -> mp.mpf | None:
    """Sum coeff(k) * x_pow over an asymptotic ladder, or None if the terms
    start growing before reaching 2^-wp (caller should retry larger N)."""
    total = mp.mpf(0)
    pw = x_pow_start
    prev = mp.inf
    thresh = mp.mpf(2) ** (-(wp + 8))
    for k in range(1, 4 * wp):
        c = coeff(k)
        term = mpf_from_fraction(c) * pw
        mag = abs(term)
        if mag >= prev:
            return None
        total += term
        if mag < thresh:
            return total
        prev = mag
        pw *= x_inv_sq
    return None


def const_gamma(precision_bits: int) -> mp.mpf:
    _check_bits(precision_bits)
    return _cached(
        ("gamma", precision_bits), lambda: gamma_brent_mcmillan(precision_bits)
    )


# --------------------------------------------------------------------------
# Riemann zeta at integers, Hurwitz zeta, digamma
# --------------------------------------------------------------------------


def zeta_borwein(s: int, precision_bits: int) -> mp.mpf:
    """zeta(s) via P. Borwein's Chebyshev acceleration of eta(s)."""
    if s < 2:
        raise ValueError("s must be >= 2")
    wp = precision_bits + GUARD_BITS
    n = int(wp / 2.543) + 6
    # d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    t = Fraction(1, n)
    acc = t
    d = [n * acc]
    for i in range(1, n + 1):
        t *= Fraction(4 * (n + i - 1) * (n - i + 1), (2 * i) * (2 * i - 1))
        acc += t
        d.append(n * acc)
    dn = d[n]
    with mp.workprec(wp):
        total = mp.mpf(0)
        for k in range(n):
            frac = (d[k] - dn) / Fraction((k + 1) ** s)
            term = mp.mpf(frac.numerator) / mp.mpf(frac.denominator)
            total += -term if k % 2 else term
        eta = -total / mpf_from_fraction(dn)
        scale = Fraction(2 ** (s - 1), 2 ** (s - 1) - 1)
        value = eta * mpf_from_fraction(scale)
    return _round_to(value, precision_bits)


def hurwitz_zeta_int(s: int, a: Union[int, Fraction], precision_bits: int) -> mp.mpf:
    """Hurwitz zeta(s, a) = sum_{j>=0} (a+j)^-s for integer s >= 2, rational
    a > 0, by Euler-Maclaurin summation."""
    if s < 2:
        raise ValueError("s must be >= 2")
    a = Fraction(a)
    if a <= 0:
        raise DomainError("Hurwitz zeta requires a > 0")
    wp = precision_bits + GUARD_BITS + 16
    p, q = a.numerator, a.denominator
    for attempt in range(5):
        with mp.workprec(wp):
            n = (int(wp * 0.1104) + 8 + s) << attempt
            qs = mp.mpf(q**s)
            base = mp.mpf(0)
            for j in range(n):
                base += qs / mp.mpf((p + j * q) ** s)
            x = mpf_from_fraction(a + n)
            value = base + x ** (1 - s) / (s - 1) + x ** (-s) / 2
            # correction coefficients B_2k/(2k)! * (s)_{2k-1}
            poch = [1, s]

            def coeff(k: int) -> Fraction:
                while len(poch) <= k:
                    m = len(poch)
                    poch.append(poch[-1] * (s + 2 * m - 3) * (s + 2 * m - 2))
                return bernoulli(2 * k) * poch[k] / math.factorial(2 * k)

            correction = _em_tail_sum(
                x_pow_start=x ** (-(s + 1)),
                x_inv_sq=x**-2,
                coeff=coeff,
                wp=wp,
            )
            if correction is not None:
                return _round_to(value + correction, precision_bits)
    raise RuntimeError("Euler-Maclaurin failed to converge for Hurwitz zeta")


def zeta_euler_maclaurin(s: int, precision_bits: int) -> mp.mpf:
    return hurwitz_zeta_int(s, Fraction(1), precision_bits)


def zeta_int(k: int, precision_bits: int) -> mp.mpf:
    """zeta(k) for integer k >= 2, absolute error < 2^-precision_bits."""
    if k < 2:
        raise ValueError("zeta_int requires k >= 2")
    _check_bits(precision_bits)
    return _cached(("zeta", k, precision_bits), lambda: zeta_borwein(k, precision_bits))


def digamma_rational(a: Union[int, Fraction], precision_bits: int) -> mp.mpf:
    """psi(a) for rational a > 0 by Euler-Maclaurin summation."""
    a = Fraction(a)
    if a <= 0:
        raise DomainError("digamma requires a > 0")
    wp = precision_bits + GUARD_BITS + 16
    p, q = a.numerator, a.denominator
    for attempt in range(5):
        with mp.workprec(wp):
            n = (int(wp * 0.1104) + 12) << attempt
            base = mp.mpf(0)
            for j in range(n):
                base += mp.mpf(q) / mp.mpf(p + j * q)
            x = mpf_from_fraction(a + n)
            value = -base + mp.log(x) - 1 / (2 * x)
            correction = _em_tail_sum(
                x_pow_start=x**-2,
                x_inv_sq=x**-2,
                coeff=lambda k: -bernoulli(2 * k) / (2 * k),
                wp=wp,
            )
            if correction is not None:
                return _round_to(value + correction, precision_bits)
    raise RuntimeError("Euler-Maclaurin failed to converge for digamma")


# --------------------------------------------------------------------------
# Catalan's constant
# --------------------------------------------------------------------------


def catalan_central_binomial(precision_bits: int) -> mp.mpf:
    """C = (3*sum 1/((2k+1)^2 binom(2k,k)) + pi*log(2+sqrt 3)) / 8."""
    wp = precision_bits + GUARD_BITS + 8
    with mp.workprec(wp):
        total = mp.mpf(0)
        comb = 1
        k = 0
        thresh = mp.mpf(2) ** (-(wp + 8))
        while True:
            term = mp.mpf(1) / (mp.mpf((2 * k + 1) ** 2) * comb)
            total += term
            if term < thresh:
                break
            comb = comb * 2 * (2 * k + 1) // (k + 1)
            k += 1
        value = (3 * total + const_pi(wp) * mp.log(2 + mp.sqrt(mp.mpf(3)))) / 8
    return _round_to(value, precision_bits)


def catalan_beta(precision_bits: int) -> mp.mpf:
    """C = beta(2) = (zeta(2, 1/4) - zeta(2, 3/4)) / 16."""
    wp = precision_bits + 8
    with mp.workprec(wp + GUARD_BITS):
        value = (
            hurwitz_zeta_int(2, Fraction(1, 4), wp)
            - hurwitz_zeta_int(2, Fraction(3, 4), wp)
        ) / 16
    return _round_to(value, precision_bits)


def const_catalan(precision_bits: int) -> mp.mpf:
    _check_bits(precision_bits)
    return _cached(
        ("catalan", precision_bits),
        lambda: catalan_central_binomial(precision_bits),
    )


# --------------------------------------------------------------------------
# Elementary functions and rational logarithms
# --------------------------------------------------------------------------

ELEM_FUNCTIONS = ("exp", "log", "sqrt", "tanh", "coth", "tan", "cot", "atanh")


def apply_elem(name: str, x: mp.mpf) -> mp.mpf:
    """Elementary function at the ambient mpmath precision."""
    if name == "exp":
        return mp.exp(x)
    if name == "log":
        if x <= 0:
            raise DomainError(f"log of non-positive value {mp.nstr(mp.mpf(x), 8)}")
        return mp.log(x)
    if name == "sqrt":
        if x < 0:
            raise DomainError(f"sqrt of negative value {mp.nstr(mp.mpf(x), 8)}")
        return mp.sqrt(x)
    if name == "tanh":
        return mp.tanh(x)
    if name == "coth":
        if x == 0:
            raise DomainError("coth has a pole at 0")
        return 1 / mp.tanh(x)
    if name == "tan":
        return mp.tan(x)
    if name == "cot":
        t = mp.tan(x)
        if t == 0:
            raise DomainError("cot pole")
        return 1 / t
    if name == "atanh":
        if abs(x) >= 1:
            raise DomainError("atanh requires |x| < 1")
        return mp.atanh(x)
    raise ValueError(f"unknown elementary function {name!r}")


def elem(fn: str, x: mp.mpf, precision_bits: int) -> mp.mpf:
    """Elementary function with relative error < 2^-(precision_bits - 2)."""
    _check_bits(precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        value = apply_elem(fn, mp.mpf(x))
    return _round_to(value, precision_bits)


def log_rational(r: Union[int, Fraction], precision_bits: int) -> mp.mpf:
    """log of an exact positive rational."""
    _check_bits(precision_bits)
    r = Fraction(r)
    if r <= 0:
        raise DomainError("log_rational requires a positive rational")
    with mp.workprec(precision_bits + GUARD_BITS):
        value = mp.log(mp.mpf(r.numerator)) - mp.log(mp.mpf(r.denominator))
    return _round_to(value, precision_bits)


def _check_bits(precision_bits: int) -> None:
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
