"""Command-line front end.

Subcommands:

* ``verify``     batch-verify a fixture corpus (default: the bundled one)
* ``prove``      reverse-prove a single (a_n, b_n) conjecture
* ``recognize``  recognize a value or a spec's limit against a constant basis
* ``sum``        sum the limit series of one spec

Reports are emitted as JSON lines (deterministic: byte-identical across
runs; timings only appear under --timings) or as a human-readable table
with --format text.  Exit codes: 0 all fixtures pass, 1 any mismatch or
error, 2 usage or I/O error.  The environment variable CF_FORGE_PRECISION
overrides the default precision (decimal digits).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

import mpmath as mp

from . import cfengine, corpus, exprlang, recognizer, solver, telescope
from .closedform import eval_closed_form, render_closed_form
from .errors import CFForgeError, Unsupported
from .reporting import (
    Report,
    STATUS_ERROR,
    STATUS_MISMATCH,
    STATUS_PROVED,
    STATUS_UNSUPPORTED,
    STATUS_VERIFIED,
)

DEFAULT_PRECISION_DIGITS = 50


def digits_to_bits(digits: int) -> int:
    return int(digits * 3.3219280948873626) + 8


def _default_precision() -> int:
    env = os.environ.get("CF_FORGE_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SystemExit(f"CF_FORGE_PRECISION must be an integer, got {env!r}")
    return DEFAULT_PRECISION_DIGITS


def run_fixture(
    fx: corpus.Fixture,
    precision_digits: int,
    agreement_digits: int,
    term_budget: int,
) -> Report:
    """Verify one fixture; never raises (failures become error reports)."""
    t0 = time.monotonic()
    bits = digits_to_bits(precision_digits)
    series_bits = max(96, int(agreement_digits * 3.322) + 2)
    try:
        spec = cfengine.make_spec(fx.f, fx.g)
        given = exprlang.parse(fx.closed_form) if fx.closed_form else None
        derived = None
        try:
            derived = telescope.closed_form_for(spec)
        except Unsupported:
            pass
        series = cfengine.sum_series(spec, series_bits, term_budget)
        with mp.workprec(bits + 32):
            cf_half, cf_full = cfengine.convergent_values(spec, [512, 1024], bits)
            cf_est = 10 * abs(cf_full - cf_half) + mp.mpf(2) ** (-(bits // 2))
            cf_ok = abs(cf_full - series.value) <= cf_est
            tol = mp.mpf(10) ** (-agreement_digits)
            given_val = (
                exprlang.eval_float(given, None, bits) if given is not None else None
            )
            if derived is not None:
                derived_val = eval_closed_form(derived, bits)
                internal_ok = abs(derived_val - series.value) < tol
                target = given_val if given_val is not None else series.value
                err = abs(derived_val - target)
                ok = err < tol and internal_ok and cf_ok
                status = STATUS_PROVED if ok else STATUS_MISMATCH
            elif given_val is not None:
                err = abs(series.value - given_val)
                status = (
                    STATUS_VERIFIED if (err < tol and cf_ok) else STATUS_MISMATCH
                )
            else:
                err = None
                status = STATUS_UNSUPPORTED
        digits = max(precision_digits, 8)
        return Report(
            id=fx.id,
            status=status,
            series_value=cfengine._decimal(series.value, digits),
            cf_value=cfengine._decimal(cf_full, digits),
            closed_form_given=exprlang.render(given) if given is not None else None,
            closed_form_derived=(
                render_closed_form(derived) if derived is not None else None
            ),
            abs_err=cfengine._decimal(err, 8) if err is not None else None,
            n_terms=series.n_terms,
            precision_bits=bits,
            timings={"total_s": round(time.monotonic() - t0, 3)},
        )
    except CFForgeError as exc:
        return Report(
            id=fx.id,
            status=STATUS_ERROR,
            precision_bits=bits,
            detail=f"{type(exc).__name__}: {exc}",
            timings={"total_s": round(time.monotonic() - t0, 3)},
        )


def _emit(reports: list[Report], fmt: str, timings: bool, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        for rep in reports:
            print(rep.to_json(include_timings=timings), file=out)
    else:
        for rep in reports:
            fields = [
                f"{rep.id:24s}",
                f"{rep.status:16s}",
                f"err={rep.abs_err or '-':14s}",
                f"terms={rep.n_terms if rep.n_terms is not None else '-'}",
            ]
            if rep.closed_form_derived:
                fields.append(f"derived: {rep.closed_form_derived}")
            if rep.detail:
                fields.append(rep.detail)
            print("  ".join(str(f) for f in fields), file=out)


def cmd_verify(args) -> int:
    path = args.corpus or corpus.bundled_corpus_path()
    try:
        fixtures = corpus.load_corpus(path)
    except CFForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    agreement = args.agreement_digits or max(args.precision - 10, 20)
    reports = [
        run_fixture(fx, args.precision, agreement, args.terms) for fx in fixtures
    ]
    _emit(reports, args.format, args.timings)
    counts: dict[str, int] = {}
    for rep in reports:
        counts[rep.status] = counts.get(rep.status, 0) + 1
    summary = f"{len(reports)} fixtures: " + ", ".join(
        f"{v} {k}" for k, v in sorted(counts.items())
    )
    print(summary, file=sys.stderr if args.format == "json" else sys.stdout)
    return 1 if any(r.failing for r in reports) else 0


def cmd_prove(args) -> int:
    bits = digits_to_bits(args.precision)
    try:
        a = exprlang.parse(args.a)
        b = exprlang.parse(args.b)
    except CFForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = solver.prove(a, b, args.max_degree)
    detailbits = [f"status={result.status}"]
    if result.f is not None:
        detailbits.append(f"f={exprlang.render(exprlang.expr_from_rational(result.f))}")
    if result.g is not None:
        detailbits.append(
            f"g={exprlang.render(exprlang.expr_from_polynomial(result.g))}"
        )
    for k, v in result.checks.items():
        detailbits.append(f"{k}={v}")
    detailbits.extend(result.diagnostics)
    series_value = None
    n_terms = None
    if result.status == solver.STATUS_CANDIDATE and result.g is not None:
        spec = cfengine.CFSpec(
            exprlang.expr_from_rational(result.f),
            exprlang.expr_from_polynomial(result.g),
        )
        series = cfengine.sum_series(spec, digits_to_bits(30), args.terms)
        series_value = cfengine._decimal(series.value, args.precision)
        n_terms = series.n_terms
    status = {
        solver.STATUS_PROVED: STATUS_PROVED,
        solver.STATUS_CANDIDATE: STATUS_VERIFIED,
        solver.STATUS_FAILED: STATUS_ERROR,
    }[result.status]
    rep = Report(
        id="prove",
        status=status,
        series_value=series_value,
        closed_form_derived=(
            render_closed_form(result.closed_form)
            if result.closed_form is not None
            else None
        ),
        n_terms=n_terms,
        precision_bits=bits,
        detail="; ".join(detailbits),
    )
    _emit([rep], args.format, args.timings)
    return 0 if result.status in (solver.STATUS_PROVED, solver.STATUS_CANDIDATE) else 1


def cmd_recognize(args) -> int:
    pslq_bits = max(128, digits_to_bits(args.precision))
    basis = recognizer.default_basis(args.basis)
    try:
        if args.value:
            x = exprlang.eval_float(
                exprlang.parse(args.value), None, pslq_bits + 128
            )
            n_terms = None
        else:
            spec = cfengine.make_spec(args.f, args.g)
            series = cfengine.sum_series(spec, pslq_bits + 96, args.terms)
            x = series.value
            n_terms = series.n_terms
    except CFForgeError as exc:
        rep = Report(
            id="recognize",
            status=STATUS_ERROR,
            precision_bits=pslq_bits,
            detail=f"{type(exc).__name__}: {exc}",
        )
        _emit([rep], args.format, args.timings)
        return 1
    form = recognizer.recognize(x, basis, pslq_bits)
    if form is None:
        rep = Report(
            id="recognize",
            status=STATUS_UNSUPPORTED,
            series_value=cfengine._decimal(x, args.precision),
            n_terms=n_terms,
            precision_bits=pslq_bits,
            detail=f"no relation found against basis level {args.basis}",
        )
    else:
        rep = Report(
            id="recognize",
            status=STATUS_VERIFIED,
            series_value=cfengine._decimal(x, args.precision),
            closed_form_derived=render_closed_form(form),
            n_terms=n_terms,
            precision_bits=pslq_bits,
        )
    _emit([rep], args.format, args.timings)
    return 0


def cmd_sum(args) -> int:
    bits = digits_to_bits(args.precision)
    try:
        spec = cfengine.make_spec(args.f, args.g)
        series = cfengine.sum_series(spec, bits, args.terms)
    except CFForgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    derived = None
    try:
        derived = telescope.closed_form_for(spec)
    except (CFForgeError, Unsupported):
        pass
    rep = Report(
        id="sum",
        status=STATUS_PROVED if derived is not None else STATUS_UNSUPPORTED,
        series_value=cfengine._decimal(series.value, args.precision),
        closed_form_derived=(
            render_closed_form(derived) if derived is not None else None
        ),
        abs_err=cfengine._decimal(series.error_estimate, 5),
        n_terms=series.n_terms,
        precision_bits=bits,
    )
    _emit([rep], args.format, args.timings)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfforge",
        description="construct, verify, prove and recognize continued-fraction identities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, precision=True):
        if precision:
            p.add_argument(
                "--precision",
                type=int,
                default=_default_precision(),
                help="decimal digits (default 50, or CF_FORGE_PRECISION)",
            )
        p.add_argument(
            "--terms",
            type=int,
            default=cfengine.DEFAULT_TERM_BUDGET,
            help="series term budget",
        )
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--timings", action="store_true", help="include timings")

    p = sub.add_parser("verify", help="batch-verify a fixture corpus")
    p.add_argument("--corpus", help="corpus JSON path (default: bundled)")
    p.add_argument(
        "--agreement-digits",
        type=int,
        default=0,
        help="digits of agreement required (default precision - 10)",
    )
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("prove", help="reverse-prove a (a_n, b_n) conjecture")
    p.add_argument("--a", required=True, help="partial numerator a_n expression")
    p.add_argument("--b", required=True, help="partial denominator b_n expression")
    p.add_argument("--max-degree", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("recognize", help="recognize a constant or a spec's limit")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--value", help="constant expression to recognize")
    group.add_argument("--f", help="f(n) expression (with --g)")
    p.add_argument("--g", help="g(n) expression")
    p.add_argument("--basis", type=int, choices=(1, 2, 3), default=1)
    common(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("sum", help="sum the limit series of a spec")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    common(p)
    p.set_defaults(func=cmd_sum)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "recognize" and args.f and not args.g:
        parser.error("--f requires --g")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
