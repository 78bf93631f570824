"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems (including anything
raised while parsing input files) exit with 2, blown enumeration budgets with
3. "No safe node found" is not an exception; the search returns an empty
result and the CLI exits 4.
"""

from __future__ import annotations


class BucketRiskError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(BucketRiskError):
    """Malformed or inconsistent input data."""


class ParseError(ValidationError):
    """Syntax error in a knowledge file.

    Carries the 1-based ``line`` and ``column`` of the offending token.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class InconsistentKnowledgeError(BucketRiskError):
    """No world consistent with the bucketization satisfies the knowledge."""


class BudgetExceededError(BucketRiskError):
    """An enumeration would exceed the configured budget.

    ``count`` is the size that tripped the check, so callers can shrink the
    instance or raise the budget.
    """

    def __init__(self, count: int, budget: int):
        super().__init__(f"enumeration size {count} exceeds budget {budget}")
        self.count = count
        self.budget = budget
