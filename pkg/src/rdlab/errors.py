"""Exception types shared across the package."""


class ResourceError(RuntimeError):
    """Raised when a request would exceed a configured size cap."""


class UnsupportedConfiguration(ValueError):
    """Raised when an operation is only defined for a narrower digit system."""


class BudgetExhausted(RuntimeError):
    """Raised when a numerical tolerance cannot be met within the budget."""


class ConvergenceError(RuntimeError):
    """Raised when an iteration fails to converge within its iteration cap."""
