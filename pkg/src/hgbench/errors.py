"""Exception types shared across the package."""
from __future__ import annotations

from dataclasses import dataclass


class HgbenchError(Exception):
    """Base class for all package errors."""


@dataclass
class ParameterIssue:
    """One violated parameter constraint."""

    field: str
    value: object
    message: str

    def __str__(self) -> str:
        return f"{self.field}={self.value!r}: {self.message}"


class InvalidParameters(HgbenchError):
    """Raised when parameter validation fails; carries one issue per violation."""

    def __init__(self, issues: list[ParameterIssue]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))


class InfeasibleError(HgbenchError):
    """Raised when generation cannot proceed for structural reasons.

    Examples: no community-size vector with entries in [s_min, s_max] sums
    to n, or a node admits no community with free spots.
    """


class UnrepairableError(HgbenchError):
    """Raised when the rewiring pass has defective edges but no clean edge to trade with."""


class UndefinedInputError(HgbenchError):
    """Raised when a metric is requested on an input where it has no value,
    e.g. modularity of a graph with zero edges."""
