"""Exception hierarchy shared by all modules."""


class LevyLiouvilleError(Exception):
    """Base class."""


class DomainError(LevyLiouvilleError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ToleranceNotMetError(LevyLiouvilleError, ArithmeticError):
    """A quadrature or series did not reach the requested accuracy."""


class TailBoundExceededError(ToleranceNotMetError):
    """The certified truncation tail is larger than the requested tolerance."""


class DivergenceError(LevyLiouvilleError, ArithmeticError):
    """An integral that must be finite was found to diverge."""


class InsufficientGridError(LevyLiouvilleError, ValueError):
    """An evaluation grid does not cover the region it must cover."""


class BoundaryLeakageError(LevyLiouvilleError, ValueError):
    """A periodic transform was asked of a function that is not small at the box edge."""


class UnsupportedError(LevyLiouvilleError, NotImplementedError):
    """The operation is not defined for this input kind."""


class InconclusiveError(LevyLiouvilleError):
    """Not enough data to decide."""


class HypothesisError(LevyLiouvilleError):
    """A hypothesis required by the classification failed.

    ``failed`` lists the names of the failing checks.
    """

    def __init__(self, failed, message=None):
        self.failed = list(failed)
        super().__init__(message or "hypothesis check failed: " + ", ".join(self.failed))


class SpecParseError(LevyLiouvilleError, ValueError):
    """Operator spec file errors, each anchored to a line number."""

    def __init__(self, errors):
        self.errors = list(errors)  # [(lineno, message)]
        super().__init__("; ".join(f"line {n}: {m}" for n, m in self.errors))
