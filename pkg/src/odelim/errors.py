"""Exception hierarchy shared across the package."""


class OdelimError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(OdelimError):
    """A polynomial expression or model file failed to parse.

    Carries the 1-based line and column of the offending token.
    """

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class BadPrimeError(OdelimError):
    """A prime cannot be used (e.g. a coefficient denominator vanishes mod p)."""


class ComputationError(OdelimError):
    """The elimination pipeline could not produce a result."""


class KernelAnomalyError(ComputationError):
    """The restricted kernel at the first nonzero degree stratum had dimension > 1.

    With a correct order estimate this only happens for degenerate sample
    points or an unlucky prime and goes away on resampling; if it persists it
    indicates that the requested order exceeds the true order of the minimal
    polynomial.
    """


class BudgetExceededError(ComputationError):
    """An exact symbolic computation hit its term-count ceiling.

    The result is indeterminate: raise the budget, do not treat this as a
    negative answer.
    """


class VerificationError(OdelimError):
    """Certification failed; carries the last (unverified) candidate."""

    def __init__(self, message, candidate=None):
        super().__init__(message)
        self.candidate = candidate
