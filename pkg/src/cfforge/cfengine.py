"""Continued-fraction engine for the family a_n = -f(n)^2,
b_n = (f(n+1) g(n+1) + f(n) g(n-1)) / g(n).

Implements the convergent recurrences p_n = b_n p_{n-1} + a_n p_{n-2} (and
likewise for q) with p_-1 = 1, p_0 = b_0, q_-1 = 0, q_0 = 1, the exact
partial-sum identity

    q_n / p_n = g(0)^2 * sum_{i=0}^{n} 1 / (f(i+1) g(i) g(i+1)),

and high-precision summation of the limit series S (the continued fraction
converges to 1/S).  b_0 is (f(1) g(1) + f(0) g(-1)) / g(0) with the
f(0) g(-1) product defined as 0 whenever f(0) = 0, which the spec invariant
enforces; this makes the scaled convergent identity
p_n * g(0) = g(n+1) * prod_{i=1}^{n+1} f(i) hold exactly.

Series tails are handled by Richardson extrapolation on partial sums at
N, 2N, 4N, ... with a sliding window of depth <= 8; the reported
error_estimate is ten times the difference of the last two extrapolants and
is heuristic, never rigorous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import mpmath as mp

from . import exprlang, mpval
from .errors import (
    DivergentSeries,
    DivisionByZero,
    NotExact,
    NotRational,
    OverflowBudget,
    PoleAtIndex,
    SlowConvergence,
    SpecInvariantError,
)
from .exprlang import Expr, eval_float, eval_rational, parse, shift_var
from .qpoly import QPolynomial, RationalFunction
from .reporting import Report, STATUS_MISMATCH, STATUS_VERIFIED

DEFAULT_TERM_BUDGET = 1 << 24
RICHARDSON_DEPTH = 8
_EXACT_BIT_BUDGET = 10**7


@dataclass(frozen=True)
class CFSpec:
    """A continued-fraction instance given by the pair (f, g)."""

    f: Expr
    g: Expr


@dataclass(frozen=True)
class ConvergentState:
    """Convergent recurrence state after n steps: holds (p_{n-1}, p_n,
    q_{n-1}, q_n) as exact rationals or big floats."""

    p_prev: object
    p: object
    q_prev: object
    q: object
    n: int

    def series_value(self):
        """q_n / p_n, the partial sum of the limit series."""
        return self.q / self.p

    def cf_value(self):
        """p_n / q_n, the truncated continued fraction itself."""
        return self.p / self.q

    def determinant(self):
        """q_n p_{n-1} - q_{n-1} p_n."""
        return self.q * self.p_prev - self.q_prev * self.p


@dataclass(frozen=True)
class SeriesResult:
    value: mp.mpf
    n_terms: int
    error_estimate: mp.mpf
    rigorous: bool = False


# --------------------------------------------------------------------------
# Spec construction and exact evaluation
# --------------------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def _exact_value(expr: Expr, n: int) -> Optional[Fraction]:
    try:
        return eval_rational(expr, n)
    except NotExact:
        return None


def _float_value(expr: Expr, n: int, bits: int) -> mp.mpf:
    return eval_float(expr, n, bits)


def validate_spec(spec: CFSpec, n_check: int = 50, precision_bits: int = 192) -> None:
    """Check f(0)=0 and the nonzero-value invariants up to n_check.

    f(0)=0 is checked exactly when f is exactly evaluable, otherwise
    numerically against 2^(-precision_bits/2)."""
    f0 = _exact_value(spec.f, 0)
    if f0 is not None:
        if f0 != 0:
            raise SpecInvariantError(f"f(0) = {f0}, expected 0")
    else:
        v = _float_value(spec.f, 0, precision_bits)
        if abs(v) >= mp.mpf(2) ** (-(precision_bits // 2)):
            raise SpecInvariantError(f"|f(0)| = {mp.nstr(v, 8)} is not numerically 0")
    for name, expr, start in (("f", spec.f, 1), ("g", spec.g, 0)):
        for n in range(start, n_check + 1):
            v = _exact_value(expr, n)
            if v is not None:
                if v == 0:
                    raise SpecInvariantError(f"{name}({n}) = 0")
            elif _float_value(expr, n, 96) == 0:
                raise SpecInvariantError(f"{name}({n}) evaluates to 0")


def make_spec(
    f: Union[str, Expr],
    g: Union[str, Expr],
    n_check: int = 50,
    precision_bits: int = 192,
) -> CFSpec:
    """Parse (when given text), validate and return a CFSpec."""
    spec = CFSpec(
        parse(f) if isinstance(f, str) else f,
        parse(g) if isinstance(g, str) else g,
    )
    validate_spec(spec, n_check=n_check, precision_bits=precision_bits)
    return spec


def _value(expr: Expr, n: int, mode: str, bits: int):
    if mode == "exact":
        v = _exact_value(expr, n)
        if v is None:
            raise NotExact(f"{exprlang.render(expr)} is not exactly evaluable at {n}")
        return v
    return _float_value(expr, n, bits)


def a_n(spec: CFSpec, n: int, mode: str = "exact", precision_bits: int = 192):
    """Partial numerator a_n = -f(n)^2 for n >= 1."""
    if n < 1:
        raise ValueError("a_n is defined for n >= 1")
    v = _value(spec.f, n, mode, precision_bits)
    return -(v * v)


def b_n(spec: CFSpec, n: int, mode: str = "exact", precision_bits: int = 192):
    """Partial denominator b_n for n >= 0.

    b_0 = (f(1) g(1) + f(0) g(-1)) / g(0), where the f(0) g(-1) product is 0
    whenever f(0) = 0 so that a pole of g at -1 is never touched."""
    if n < 0:
        raise ValueError("b_n is defined for n >= 0")
    gn = _value(spec.g, n, mode, precision_bits)
    if gn == 0:
        raise PoleAtIndex(f"g({n}) = 0", n)
    hi = _value(spec.f, n + 1, mode, precision_bits) * _value(
        spec.g, n + 1, mode, precision_bits
    )
    if n == 0:
        f0 = _exact_value(spec.f, 0)
        if f0 is None:
            f0 = _float_value(spec.f, 0, precision_bits)
            if abs(f0) < mp.mpf(2) ** (-(precision_bits // 2)):
                f0 = 0
        if f0 == 0:
            return hi / gn
        lo = f0 * _value(spec.g, -1, mode, precision_bits)
    else:
        lo = _value(spec.f, n, mode, precision_bits) * _value(
            spec.g, n - 1, mode, precision_bits
        )
    return (hi + lo) / gn


def b_expr(spec: CFSpec) -> Expr:
    """The symbolic b_n expression (f(n+1)g(n+1) + f(n)g(n-1)) / g(n)."""
    f_up = shift_var(spec.f, 1)
    g_up = shift_var(spec.g, 1)
    g_dn = shift_var(spec.g, -1)
    return exprlang.Div(
        exprlang.Add(exprlang.Mul(f_up, g_up), exprlang.Mul(spec.f, g_dn)), spec.g
    )


def f_product(spec: CFSpec, n: int) -> Fraction:
    """F_n = prod_{i=1}^{n+1} f(i), exact (F_-1 = 1)."""
    acc = Fraction(1)
    for i in range(1, n + 2):
        v = _exact_value(spec.f, i)
        if v is None:
            raise NotExact(f"f({i}) is not exactly evaluable")
        acc *= v
    return acc


def iterate_cf(
    spec: CFSpec,
    N: int,
    mode: str = "exact",
    precision_bits: int = 192,
    bit_budget: int = _EXACT_BIT_BUDGET,
) -> ConvergentState:
    """Run the convergent recurrences up to depth N (N >= 0)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    wp = precision_bits + 32
    if mode == "exact":
        one, zero = Fraction(1), Fraction(0)
        b0 = b_n(spec, 0, "exact")
    else:
        one, zero = mp.mpf(1), mp.mpf(0)
        b0 = None

    def run():
        nonlocal b0
        if mode == "float":
            b0 = b_n(spec, 0, "float", wp)
        p_prev, p = one, b0 * one
        q_prev, q = zero, one
        for n in range(1, N + 1):
            a = a_n(spec, n, mode, wp)
            b = b_n(spec, n, mode, wp)
            p, p_prev = b * p + a * p_prev, p
            q, q_prev = b * q + a * q_prev, q
            if mode == "exact" and n % 32 == 0:
                size = p.numerator.bit_length() + p.denominator.bit_length()
                if size > bit_budget:
                    raise OverflowBudget(
                        f"exact state reached {size} bits at n={n} (cap {bit_budget})"
                    )
        return ConvergentState(p_prev, p, q_prev, q, N)

    if mode == "float":
        with mp.workprec(wp):
            return run()
    return run()


def partial_sum(spec: CFSpec, N: int) -> Fraction:
    """Exact S_N = g(0)^2 * sum_{i=0}^{N} 1/(f(i+1) g(i) g(i+1))."""
    if N < 0:
        raise ValueError("N must be >= 0")
    gv = []
    for i in range(N + 2):
        v = _exact_value(spec.g, i)
        if v is None:
            raise NotExact(f"g({i}) is not exactly evaluable")
        if v == 0:
            raise PoleAtIndex(f"g({i}) = 0", i)
        gv.append(v)
    total = Fraction(0)
    for i in range(N + 1):
        fv = _exact_value(spec.f, i + 1)
        if fv is None:
            raise NotExact(f"f({i + 1}) is not exactly evaluable")
        if fv == 0:
            raise PoleAtIndex(f"f({i + 1}) = 0", i + 1)
        total += Fraction(1) / (fv * gv[i] * gv[i + 1])
    return gv[0] * gv[0] * total


# --------------------------------------------------------------------------
# Series summation
# --------------------------------------------------------------------------


def _exp_rational(e: Expr):
    """Decompose multiplicatively as exp(slope*n + intercept) * R(n) with R a
    rational function; returns (slope, intercept, R) or None."""
    try:
        return (Fraction(0), Fraction(0), exprlang.as_rational_function(e))
    except NotRational:
        pass
    if isinstance(e, exprlang.Func) and e.name == "exp":
        try:
            arg = exprlang.as_rational_function(e.arg)
        except NotRational:
            return None
        if not arg.is_polynomial or arg.num.degree > 1:
            return None
        poly = arg.as_polynomial()
        return (
            poly.coefficient(1),
            poly.coefficient(0),
            RationalFunction.from_scalar(1),
        )
    if isinstance(e, exprlang.Neg):
        sub = _exp_rational(e.child)
        if sub is None:
            return None
        s, c, r = sub
        return (s, c, -r)
    if isinstance(e, (exprlang.Mul, exprlang.Div)):
        left = _exp_rational(e.left)
        right = _exp_rational(e.right)
        if left is None or right is None:
            return None
        ls, lc, lr = left
        rs, rc, rr = right
        if isinstance(e, exprlang.Mul):
            return (ls + rs, lc + rc, lr * rr)
        if rr.is_zero:
            return None
        return (ls - rs, lc - rc, lr / rr)
    if isinstance(e, exprlang.Pow):
        sub = _exp_rational(e.base)
        if sub is None:
            return None
        s, c, r = sub
        k = e.exponent
        if k < 0 and r.is_zero:
            return None
        return (s * k, c * k, r**k)
    return None


@dataclass
class _FixedPlan:
    """Term T(n) = (p/q) * exp(-(slope*n + kappa)) * P(n)/Q(n), P, Q integer
    polynomials."""

    p: int
    q: int
    P: QPolynomial
    Q: QPolynomial
    slope: Fraction
    kappa: Fraction
    decay_degree: Optional[int]  # deg Q - deg P when slope == 0


def _plan_fixed(spec: CFSpec) -> Optional[_FixedPlan]:
    df = _exp_rational(spec.f)
    dg = _exp_rational(spec.g)
    if df is None or dg is None:
        return None
    sf, cf_, rf = df
    sg, cg, rg = dg
    if rf.is_zero or rg.is_zero:
        return None
    sigma = sf + 2 * sg
    kappa = sf + cf_ + sg  # exp part of g(0)^2 = e^{2 cg} Rg(0)^2 cancels 2*cg
    if sigma < 0:
        raise DivergentSeries(f"exponential growth factor exp({-sigma}*n) in terms")
    g0 = rg.eval(0)
    rat = (rf.shift(1) * rg * rg.shift(1)).inverse() * (g0 * g0)
    decay = None
    if sigma == 0:
        decay = rat.den.degree - rat.num.degree
        if decay < 2:
            raise DivergentSeries(
                f"term decay degree {decay} < 2; series diverges or converges too slowly"
            )
    cnum, pnum = rat.num.primitive()
    cden, pden = rat.den.primitive()
    scale = cnum / cden
    return _FixedPlan(
        p=scale.numerator,
        q=scale.denominator,
        P=pnum,
        Q=pden,
        slope=sigma,
        kappa=kappa,
        decay_degree=decay,
    )


def _diff_table(poly: QPolynomial) -> list[int]:
    """Forward-difference table [P(0), dP(0), d^2P(0), ...] (integer P)."""
    d = max(poly.degree, 0)
    vals = [int(poly.eval(i)) for i in range(d + 1)]
    table = []
    while vals:
        table.append(vals[0])
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return table


def _step_diffs(diffs: list[int]) -> None:
    for i in range(len(diffs) - 1):
        diffs[i] += diffs[i + 1]


def _richardson(sums: Sequence[mp.mpf], e0: int) -> tuple[mp.mpf, mp.mpf]:
    """Extrapolate partial sums at N, 2N, 4N... assuming tail exponents
    e0, e0+1, ...; returns (value, 10x the difference between the last two
    extrapolation levels)."""
    row = list(sums)
    last_of_prev = row[-1]
    for k in range(1, len(sums)):
        fac = 1 << (e0 + k - 1)
        new = [(fac * row[i + 1] - row[i]) / (fac - 1) for i in range(len(row) - 1)]
        last_of_prev = row[-1]
        row = new
    return row[0], 10 * abs(row[0] - last_of_prev)


def _check_window(window: list) -> None:
    if not window:
        return
    if any(t <= 0 for t in window):
        raise DivergentSeries("series terms are not eventually positive")
    if any(b > a for a, b in zip(window, window[1:])):
        raise DivergentSeries("series terms are not eventually decreasing")


_WINDOW_LO, _WINDOW_HI = 48, 64
_FIRST_CHECKPOINT = 32


def _sum_series_fixed(
    plan: _FixedPlan, precision_bits: int, term_budget: int
) -> SeriesResult:
    wp = precision_bits + 64
    wx = wp + 32
    tol = mp.mpf(2) ** (-precision_bits)
    if plan.slope == 0 and plan.kappa == 0:
        x = 1 << wx
        mult = None
    else:
        with mp.workprec(wx + 16):
            x = int(mp.floor(mp.exp(mpval.mpf_from_fraction(-plan.kappa)) * (1 << wx)))
            mult = (
                None
                if plan.slope == 0
                else int(mp.floor(mp.exp(mpval.mpf_from_fraction(-plan.slope)) * (1 << wx)))
            )
    shift = 1 << (wx - wp)
    dP = _diff_table(plan.P)
    dQ = _diff_table(plan.Q)
    pnum, qden = plan.p, plan.q
    geometric = plan.slope > 0
    acc = 0
    n = 0
    next_ck = _FIRST_CHECKPOINT
    sums: list[mp.mpf] = []
    terms: list[int] = []
    window: list[int] = []
    with mp.workprec(wp + 16):
        scale_back = mp.mpf(2) ** (-wp)
        while n < term_budget:
            qn = dQ[0]
            if qn == 0:
                raise PoleAtIndex("term denominator vanished", n)
            term = (x * pnum * dP[0]) // (qden * qn * shift)
            acc += term
            if mult is not None:
                x = (x * mult) >> wx
            _step_diffs(dP)
            _step_diffs(dQ)
            n += 1
            if _WINDOW_LO <= n <= _WINDOW_HI:
                window.append(term)
            if n == next_ck:
                if n >= _WINDOW_HI:
                    _check_window(window)
                    window = []
                sums.append(mp.mpf(acc) * scale_back)
                terms.append(term)
                if len(sums) > RICHARDSON_DEPTH:
                    sums.pop(0)
                    terms.pop(0)
                value_est = None
                if geometric:
                    r = mp.mpf(mult) / (1 << wx)
                    tail = mp.mpf(term) * scale_back * r / (1 - r) if r < 1 else mp.inf
                    if tail < tol / 16 or term == 0:
                        value_est = (sums[-1], 10 * (tail + scale_back * n))
                elif len(sums) >= 4:
                    extrap, est = _richardson(sums, plan.decay_degree - 1)
                    if est <= tol:
                        value_est = (extrap, est)
                if value_est is not None:
                    value, est = value_est
                    return SeriesResult(+value, n, +(est + mp.mpf(2) ** (-precision_bits - 24)))
                next_ck *= 2
        raise SlowConvergence(
            f"term budget {term_budget} exhausted before reaching 2^-{precision_bits}"
        )


def _sum_series_float(
    spec: CFSpec, precision_bits: int, term_budget: int
) -> SeriesResult:
    wp = precision_bits + 48
    tol = mp.mpf(2) ** (-precision_bits)
    denom_expr = exprlang.Mul(
        shift_var(spec.f, 1), exprlang.Mul(spec.g, shift_var(spec.g, 1))
    )
    with mp.workprec(wp + 32):
        g0 = eval_float(spec.g, 0, wp + 16)
        scale = g0 * g0
        acc = mp.mpf(0)
        n = 0
        next_ck = _FIRST_CHECKPOINT
        sums: list[mp.mpf] = []
        terms: list[mp.mpf] = []
        window: list[mp.mpf] = []
        while n < term_budget:
            d = eval_float(denom_expr, n, wp)
            if d == 0:
                raise PoleAtIndex("term denominator vanished", n)
            term = scale / d
            acc += term
            n += 1
            if _WINDOW_LO <= n <= _WINDOW_HI:
                window.append(term)
            if n == next_ck:
                if n >= _WINDOW_HI:
                    _check_window(window)
                    window = []
                sums.append(acc)
                terms.append(term)
                if len(sums) > RICHARDSON_DEPTH:
                    sums.pop(0)
                    terms.pop(0)
                if len(sums) >= 2:
                    ratio = terms[-2] / terms[-1] if terms[-1] > 0 else mp.inf
                    if terms[-1] == 0 or term < tol * abs(acc) / 16:
                        # effectively geometric cut-off
                        est = 10 * (terms[-1] + abs(acc) * mp.mpf(2) ** (-wp + 8))
                        return SeriesResult(+acc, n, +est)
                    s_hat = mp.log(ratio, 2)
                    if s_hat < 1.5:
                        raise DivergentSeries(
                            f"estimated decay degree {mp.nstr(s_hat, 4)} < 2"
                        )
                    e0 = max(int(mp.nint(s_hat)) - 1, 1)
                    if len(sums) >= 4:
                        extrap, est = _richardson(sums, e0)
                        if est <= tol:
                            return SeriesResult(
                                +extrap, n, +(est + mp.mpf(2) ** (-precision_bits - 16))
                            )
                next_ck *= 2
        raise SlowConvergence(
            f"term budget {term_budget} exhausted before reaching 2^-{precision_bits}"
        )


def sum_series(
    spec: CFSpec,
    precision_bits: int = 192,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> SeriesResult:
    """Numerically sum S = g(0)^2 * sum_{n>=0} 1/(f(n+1) g(n) g(n+1)) aiming
    at an error estimate below 2^-precision_bits.

    Polynomial-decay tails go through Richardson extrapolation; a decaying
    exponential factor in the terms is stepped multiplicatively and the sum
    is cut off directly.  Raises DivergentSeries when the effective decay
    degree is below 2 and SlowConvergence when the budget runs out."""
    plan = _plan_fixed(spec)
    if plan is not None:
        return _sum_series_fixed(plan, precision_bits, term_budget)
    return _sum_series_float(spec, precision_bits, term_budget)


# --------------------------------------------------------------------------
# Identity verification
# --------------------------------------------------------------------------


def _decimal(x, digits: int) -> str:
    # conversion must happen at enough precision or the value is truncated
    with mp.workprec(int(digits * 3.33) + 16):
        return mp.nstr(+mp.mpf(x), digits, strip_zeros=False)


def convergent_values(
    spec: CFSpec, depths: Sequence[int], precision_bits: int
) -> list[mp.mpf]:
    """Series values q_N/p_N at each requested depth, one float pass."""
    out = []
    for N in sorted(depths):
        state = iterate_cf(spec, N, mode="float", precision_bits=precision_bits)
        out.append(state.series_value())
    return out


def verify_identity(
    spec: CFSpec,
    closed_form: Expr,
    precision_bits: int = 192,
    agreement_digits: int = 40,
    term_budget: int = DEFAULT_TERM_BUDGET,
    report_id: str = "",
) -> Report:
    """Compare the summed series, the closed form and the CF convergent.

    Status is verified_numeric iff |series - closed_form| < 10^-agreement
    and the convergent agrees with the series within its own (heuristic)
    estimate; a disagreement is reported as a mismatch, not an error."""
    if not exprlang.is_constant(closed_form):
        raise ValueError("closed form must be a constant expression")
    series_bits = max(96, int(agreement_digits * 3.322) + 2)
    series = sum_series(spec, series_bits, term_budget)
    with mp.workprec(precision_bits + 32):
        closed_val = eval_float(closed_form, None, precision_bits)
        err = abs(series.value - closed_val)
        cf_half, cf_full = convergent_values(spec, [512, 1024], precision_bits)
        cf_est = 10 * abs(cf_full - cf_half) + mp.mpf(2) ** (-precision_bits // 2)
        cf_ok = abs(cf_full - series.value) <= cf_est
        agree = err < mp.mpf(10) ** (-agreement_digits)
    digits = max(int(precision_bits / 3.3219), 8)
    return Report(
        id=report_id,
        status=STATUS_VERIFIED if (agree and cf_ok) else STATUS_MISMATCH,
        series_value=_decimal(series.value, digits),
        cf_value=_decimal(cf_full, digits),
        closed_form_given=exprlang.render(closed_form),
        closed_form_derived=None,
        abs_err=_decimal(err, 8),
        n_terms=series.n_terms,
        precision_bits=precision_bits,
    )
