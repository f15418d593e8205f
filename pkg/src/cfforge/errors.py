"""Exception taxonomy shared across the package."""


class CFForgeError(Exception):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(CFForgeError, ValueError):
    """Malformed expression text; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    """An identifier that is neither the variable, a constant nor a function."""


class NotExact(CFForgeError):
    """Exact rational evaluation hit a surd or transcendental atom."""


class NotRational(CFForgeError):
    """Expression is not a rational function of the variable."""


class DivisionByZero(CFForgeError, ZeroDivisionError):
    """Division by an exactly-zero subterm; carries the offending subterm."""

    def __init__(self, subterm: str, at=None):
        where = "" if at is None else f" at n={at}"
        super().__init__(f"division by zero in {subterm!r}{where}")
        self.subterm = subterm
        self.at = at


class DomainError(CFForgeError, ValueError):
    """Argument outside a function's domain (log of non-positive, pole, ...)."""


class SpecInvariantError(CFForgeError):
    """A continued-fraction spec violates f(0)=0 or a nonzero-value invariant."""


class PoleAtIndex(CFForgeError):
    """f or g vanished at an index needed by the recurrence or the series."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class OverflowBudget(CFForgeError):
    """Exact-rational state exceeded the configured bit-size cap."""


class DivergentSeries(CFForgeError):
    """Series terms do not decay fast enough (effective degree < 2)."""


class SlowConvergence(CFForgeError):
    """Requested precision unreachable within the term budget."""


class DegreeTooHigh(CFForgeError):
    """Partial-fraction numerator degree >= total pole multiplicity."""


class NonConvergent(CFForgeError):
    """Simple-pole coefficients do not cancel; the formal sum diverges."""


class UnsupportedShift(CFForgeError):
    """A pole shift is not an exact rational."""


class Unsupported(CFForgeError):
    """No symbolic closed form for this spec (non-linear or surd factors)."""


class Degenerate(CFForgeError):
    """Quartic normalization collapsed (coincident non-square roots)."""


class PrecisionTooLow(CFForgeError):
    """Integer-relation search needs more working precision."""


class CorpusError(CFForgeError):
    """Fixture corpus file is structurally invalid."""
