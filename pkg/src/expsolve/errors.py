"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Raised when an argument violates a documented precondition."""


class NumericalFailure(ArithmeticError):
    """Raised when an iterative method fails to deliver a certified result.

    ``diagnostics`` carries whatever the failing routine knows about the
    failure (iteration counts, last residuals, ...), so the CLI can report it.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
