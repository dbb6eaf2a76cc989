"""Exception taxonomy shared by the library and the CLI.

Exit-code mapping used by the CLI: UsageError (and subclasses) -> 3,
VerificationError -> 2, anything else -> 1.
"""


class UsageError(ValueError):
    """A precondition or argument violation; the caller passed something invalid."""


class PrecisionError(UsageError):
    """A high-precision comparison could not be decided at the stored precision.

    Raised instead of guessing, so schedules stay reproducible bit for bit.
    """


class VerificationError(AssertionError):
    """An internal cross-check or tolerance gate failed."""


class BudgetExceededError(UsageError):
    """An enumeration exceeded its explicit budget."""

    def __init__(self, budget: int, count: int):
        super().__init__(f"enumeration budget {budget} exceeded after {count} items")
        self.budget = budget
        self.count = count
