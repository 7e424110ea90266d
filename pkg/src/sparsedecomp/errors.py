class SparseDecompError(Exception):
    """Base class for errors raised by this package."""


class PreconditionViolated(SparseDecompError, ValueError):
    pass


class TermBudgetExceeded(SparseDecompError):
    pass


class BudgetExceeded(SparseDecompError):
    """Exhaustive support enumeration would exceed the configured budget."""


class NoConvergence(SparseDecompError, ArithmeticError):
    pass


class LpFailure(SparseDecompError):
    """The basis-pursuit LP did not reach an optimal vertex."""

    def __init__(self, status, message=""):
        self.status = status
        super().__init__(message or f"LP solve ended with status {status}")
