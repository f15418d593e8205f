"""Reverse direction: recover (f, g) from a conjectured polynomial pair
(a_n, b_n) and machine-prove the identity.

Given a_n = -f(n)^2, f is read off by a polynomial square root; g is then
found by equating coefficients in the functional identity

    b(n) g(n) - f(n+1) g(n+1) - f(n) g(n-1) == 0

and solving the resulting exact linear system.  A returned g makes the
residual the exact zero polynomial (verified by expansion, never by
sampling).  When the telescoping engine supports the recovered pair, the
exact closed form of the limit series is attached and the result is a proof;
otherwise the pair is a verified candidate for numeric checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from . import cfengine, exprlang, telescope
from .closedform import ClosedForm
from .errors import (
    Degenerate,
    DivergentSeries,
    NotRational,
    SpecInvariantError,
    Unsupported,
)
from .exprlang import Expr, as_rational_function, expr_from_polynomial, expr_from_rational
from .qpoly import QPolynomial, RationalFunction, nullspace

STATUS_PROVED = "proved"
STATUS_CANDIDATE = "candidate"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class ProofResult:
    f: Optional[RationalFunction]
    g: Optional[QPolynomial]
    closed_form: Optional[ClosedForm]
    checks: dict
    status: str
    diagnostics: tuple[str, ...] = ()


def poly_sqrt(p: QPolynomial) -> Optional[QPolynomial]:
    """Exact square root with positive leading coefficient, or None."""
    if p.is_zero:
        raise ValueError("poly_sqrt of the zero polynomial")
    if p.degree % 2:
        return None
    lead = p.leading
    if lead < 0:
        return None
    rn, rd = math.isqrt(lead.numerator), math.isqrt(lead.denominator)
    if rn * rn != lead.numerator or rd * rd != lead.denominator:
        return None
    half = p.degree // 2
    q = [Fraction(0)] * (half + 1)
    q[half] = Fraction(rn, rd)
    # match coefficients of degree 2*half-1 ... half descending
    for k in range(half - 1, -1, -1):
        target = p.coefficient(k + half)
        acc = Fraction(0)
        for i in range(k + 1, half):
            j = k + half - i
            if j > half:
                return None
            acc += q[i] * q[j]
        q[k] = (target - acc) / (2 * q[half])
    candidate = QPolynomial(q)
    return candidate if candidate * candidate == p else None


def rational_sqrt(r: RationalFunction) -> Optional[RationalFunction]:
    """Square root of a rational function when num and den are both squares."""
    num = poly_sqrt(r.num)
    if num is None:
        return None
    den = poly_sqrt(r.den)
    if den is None:
        return None
    return RationalFunction(num, den)


def _primitive_positive(p: QPolynomial) -> QPolynomial:
    _, prim = p.primitive()
    return prim


def solve_g(
    f: Union[RationalFunction, QPolynomial],
    b: Union[RationalFunction, QPolynomial],
    max_degree: int = 6,
) -> list[QPolynomial]:
    """All polynomials g of degree <= max_degree (up to scaling) with
    b(n) g(n) == f(n+1) g(n+1) + f(n) g(n-1) identically.

    Returned primitive with positive leading coefficient, in ascending
    degree (a reduced basis when the solution space has dimension > 1);
    empty list when no solution exists."""
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    if isinstance(f, QPolynomial):
        f = RationalFunction(f)
    if isinstance(b, QPolynomial):
        b = RationalFunction(b)
    f_up = f.shift(1)
    # clear denominators: multiply the identity by lcm of the three
    denom_lcm = b.den * (f_up.den // f_up.den.gcd(b.den))
    denom_lcm = denom_lcm * (f.den // f.den.gcd(denom_lcm))
    p_b = b.num * (denom_lcm // b.den)
    p_up = f_up.num * (denom_lcm // f_up.den)
    p_dn = f.num * (denom_lcm // f.den)

    ncols = max_degree + 1
    monos_mid = [QPolynomial([0] * k + [1]) for k in range(ncols)]
    monos_up = [m.shift(1) for m in monos_mid]
    monos_dn = [m.shift(-1) for m in monos_mid]
    cols = [
        p_b * monos_mid[k] - p_up * monos_up[k] - p_dn * monos_dn[k]
        for k in range(ncols)
    ]
    nrows = max(c.degree for c in cols) + 1
    rows = [[cols[k].coefficient(r) for k in range(ncols)] for r in range(nrows)]
    basis = nullspace(rows, ncols)
    if not basis:
        return []
    # echelonize on the highest-degree coefficients so each solution gets a
    # distinct minimal leading degree
    vecs = [list(v) for v in basis]
    for col in range(ncols - 1, -1, -1):
        pivot_row = next(
            (
                i
                for i, v in enumerate(vecs)
                if v[col] != 0 and all(v[c] == 0 for c in range(col + 1, ncols))
            ),
            None,
        )
        if pivot_row is None:
            continue
        pv = vecs[pivot_row]
        for i, v in enumerate(vecs):
            if i != pivot_row and v[col] != 0 and all(
                v[c] == 0 for c in range(col + 1, ncols)
            ):
                factor = v[col] / pv[col]
                vecs[i] = [a - factor * bb for a, bb in zip(v, pv)]
    polys = [QPolynomial(v) for v in vecs if any(v)]
    polys = [_primitive_positive(p) for p in polys]
    polys = sorted(set(polys), key=lambda p: (p.degree, p.coeffs))
    # expansion check: every returned g must zero the residual exactly
    for g in polys:
        residual = p_b * g - p_up * g.shift(1) - p_dn * g.shift(-1)
        if not residual.is_zero:
            raise AssertionError(f"nullspace produced nonzero residual for g={g}")
    return polys


def normalize_quartic(
    alpha: Union[int, Fraction],
    beta: Union[int, Fraction],
    gamma: Union[int, Fraction],
) -> tuple[Expr, Expr]:
    """Candidate (f, g) for a quartic numerator (n+alpha)^2 (n+beta) (n+gamma).

    After centering on the squared root (beta1 = beta - alpha, gamma1 =
    gamma - alpha) and rescaling away the (gamma1 - beta1)^2 factor, the
    candidate is f(n) = n, g(n) = (gamma1 - beta1) n + beta1.  This is a
    candidate only: acceptance is by the algebraic verification done in
    prove/solve_g, since the variable changes may break the initial
    conditions.  Raises Degenerate when gamma1 == beta1."""
    alpha, beta, gamma = Fraction(alpha), Fraction(beta), Fraction(gamma)
    beta1 = beta - alpha
    gamma1 = gamma - alpha
    if gamma1 == beta1:
        raise Degenerate("coincident non-square roots: (gamma1 - beta1) == 0")
    f_expr = exprlang.VAR
    g_expr = expr_from_polynomial(QPolynomial((beta1, gamma1 - beta1)))
    return f_expr, g_expr


def _check_pair(f: RationalFunction, g: QPolynomial, b: RationalFunction) -> dict:
    checks: dict = {}
    checks["f0_zero"] = f.den.eval(0) != 0 and f.num.eval(0) == 0
    g0 = g.eval(0)
    b0_ok = g0 != 0 and b.den.eval(0) != 0
    if b0_ok and checks["f0_zero"]:
        b0_ok = b.eval(0) == f.eval(1) * g.eval(1) / g0
    checks["b0_consistent"] = bool(b0_ok)
    return checks


def prove(a: Expr, b: Expr, max_degree: int = 6) -> ProofResult:
    """Full reverse pipeline: a -> f by square root, solve for g, then
    telescope the recovered spec to a closed form.

    status: proved (identity exact, checks pass, closed form derived),
    candidate (identity exact and checks pass but telescoping unsupported;
    verify numerically), failed (with diagnostics)."""
    diagnostics: list[str] = []
    try:
        a_rf = as_rational_function(a)
        b_rf = as_rational_function(b)
    except NotRational as exc:
        return ProofResult(None, None, None, {}, STATUS_FAILED, (str(exc),))
    f = rational_sqrt(-a_rf)
    if f is None:
        return ProofResult(
            None, None, None, {}, STATUS_FAILED, ("-a_n is not a perfect square",)
        )
    gs = solve_g(f, b_rf, max_degree)
    if not gs:
        return ProofResult(
            f,
            None,
            None,
            {},
            STATUS_FAILED,
            (f"no polynomial g of degree <= {max_degree} satisfies the identity",),
        )
    residual_degree = max_degree + max(
        b_rf.num.degree + b_rf.den.degree, f.num.degree + f.den.degree
    )
    for g in gs:
        checks = _check_pair(f, g, b_rf)
        checks["functional_identity_verified_degree"] = residual_degree
        if not (checks["f0_zero"] and checks["b0_consistent"]):
            diagnostics.append(f"g={g} rejected by b0/f(0) checks")
            continue
        f_expr = expr_from_rational(f)
        g_expr = expr_from_polynomial(g)
        try:
            spec = cfengine.make_spec(f_expr, g_expr, n_check=30)
        except SpecInvariantError as exc:
            diagnostics.append(f"g={g}: {exc}")
            continue
        try:
            closed = telescope.closed_form_for(spec)
            return ProofResult(f, g, closed, checks, STATUS_PROVED, tuple(diagnostics))
        except (Unsupported, DivergentSeries) as exc:
            diagnostics.append(f"telescoping unsupported: {exc}")
            return ProofResult(f, g, None, checks, STATUS_CANDIDATE, tuple(diagnostics))
    checks = _check_pair(f, gs[0], b_rf)
    checks["functional_identity_verified_degree"] = residual_degree
    return ProofResult(f, None, None, checks, STATUS_FAILED, tuple(diagnostics))
