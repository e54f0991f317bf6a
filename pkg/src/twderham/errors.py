"""Exception hierarchy.

Every error raised on purpose by the engine derives from :class:`TwDeRhamError`.
The CLI maps :class:`InputError` subclasses to exit code 2 and everything else
to exit code 1, reporting ``type(err).__name__`` verbatim.
"""


class TwDeRhamError(Exception):
    """Base class for all engine errors."""


class InputError(TwDeRhamError):
    """Malformed or unsupported user input (CLI exit code 2)."""


class ParseError(InputError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SpecMismatch(TwDeRhamError, TypeError):
    """Operands live over different rings or in different variable counts."""


class NotAUnit(TwDeRhamError, ArithmeticError):
    pass


class DenominatorNotInvertible(TwDeRhamError, ArithmeticError):
    pass


class TorsionRing(InputError):
    """Normalized integrals are only defined over torsion-free rings."""


class MatrixNotInvertible(TwDeRhamError, ArithmeticError):
    pass


class MatrixNotUnimodular(MatrixNotInvertible):
    pass


class NonTerminating(TwDeRhamError):
    pass


class NotZeroDimensional(TwDeRhamError):
    """The Jacobian ideal has infinitely many standard monomials."""


class IterationCapExceeded(TwDeRhamError):
    pass


class GenericityFailure(TwDeRhamError):
    pass


class NoDependence(TwDeRhamError):
    pass


class FactorialNotInvertible(TwDeRhamError, ArithmeticError):
    pass


class PrecisionExhausted(TwDeRhamError):
    pass


class ReductionDiverged(TwDeRhamError):
    pass


class MilnorMismatch(TwDeRhamError):
    pass


class NotClosed(InputError):
    """A 1-form supplied in place of df is not closed."""


class TimeBudgetExceeded(TwDeRhamError):
    """The wall-clock budget given with ``--time-budget-ms`` ran out."""
