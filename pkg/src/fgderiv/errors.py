"""Exception types shared across the package.

Every mathematically meaningful failure gets its own class so callers
(and the CLI exit-code mapping) can distinguish "the algebra says no"
from plain misuse.
"""


class AlgebraError(Exception):
    """Base class for all domain errors raised by this package."""


class FieldMismatch(AlgebraError):
    """Operands live over different coefficient fields."""


class DivisionByZero(AlgebraError, ZeroDivisionError):
    """Division or inversion of zero in an exact field."""


class IntegralityViolation(AlgebraError):
    """A rational coefficient has p in its denominator, so reduction
    mod p is undefined."""


class PositiveValuationRequired(AlgebraError):
    """Substitution argument must have zero constant term."""


class NotReversible(AlgebraError):
    """Series has no compositional inverse (f(0) != 0 or non-unit
    linear coefficient)."""


class NotAUnit(AlgebraError):
    """Constant term is not a unit of its coefficient ring."""


class InsufficientPrecision(AlgebraError):
    """The requested value could still change at higher truncation
    order, so returning it would be dishonest."""


class MalformedPSeries(AlgebraError):
    """The p-series of a purported group law has a lowest-degree term
    that is not a power of p."""


class OrderOutOfRange(AlgebraError, IndexError):
    """A derivation order >= the declared bound was requested."""


class WindowOverflow(AlgebraError):
    """A Laurent polynomial left the declared exponent window."""


class NotProportional(AlgebraError):
    """d^(p) is not a scalar multiple of d."""


class NotNilpotent(AlgebraError):
    """d^(p) != 0, so d admits no additively iterative prolongation."""


class NotMultiplicativelyRestricted(AlgebraError):
    """d^(p) != d, so d admits no multiplicatively iterative
    prolongation."""


class InvalidGroupLaw(AlgebraError):
    """A supplied bivariate series fails the group-law axioms."""


class ParseError(AlgebraError, ValueError):
    """Malformed descriptor, polynomial text, or serialized object."""
