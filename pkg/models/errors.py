from typing import Optional


class SetFunctionError(Exception):
    """Base class for every error raised by the library."""


class DomainError(SetFunctionError, ValueError):
    """Input outside the domain of an operation (bad mask, bad file, bad partition...)."""


class PreconditionError(SetFunctionError):
    """A hypothesis an operation relies on does not hold for the given function."""

    def __init__(self, message: str, witness=None, value=None):
        super().__init__(message)
        self.witness = witness
        self.value = value


class ConsistencyError(SetFunctionError, RuntimeError):
    """An internal self-check failed. Always a bug, never a valid outcome."""


class QueryBudgetExceeded(SetFunctionError):
    """A query strategy asked for more distinct subsets than it was allowed."""

    def __init__(self, budget: int, mask: Optional[int] = None):
        super().__init__(f"query budget of {budget} distinct subsets exhausted")
        self.budget = budget
        self.mask = mask
