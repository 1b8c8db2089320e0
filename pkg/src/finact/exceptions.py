class FinactError(Exception):
    """Base class for library errors."""


class BudgetExceeded(FinactError):
    """A size cap (vertices, quotient order, ball size) was hit."""


class FamilyMismatch(FinactError, ValueError):
    pass


class UnsupportedFamily(FinactError, ValueError):
    pass


class ProblemError(FinactError, ValueError):
    """Invalid problem input; ``path`` is a JSON path like ``$.epsilon``."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
