"""Exception types shared across focklab."""


class FocklabError(Exception):
    """Base class for all focklab errors."""


class InvalidArgument(FocklabError, ValueError):
    pass


class BudgetExceeded(FocklabError):
    """Raised when a request falls outside the binary64 cancellation budget.

    The harness maps this to exit status 3.
    """


class ProjectionTailError(FocklabError):
    """The truncated basis does not carry enough of a kernel vector's norm."""


class SymbolicOnly(FocklabError):
    """Numeric evaluation was requested for a quantity that only exists in log-space."""
