"""Exception types raised by the design engines."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class H2PError(Exception):
    """Base class for every error raised by this package."""


@dataclass(frozen=True)
class Violation:
    """One failed input constraint."""

    field: str
    constraint: str
    value: Any

    def __str__(self) -> str:
        return f"{self.field}: {self.constraint} (got {self.value!r})"


class ValidationError(H2PError, ValueError):
    """Raised when design inputs violate one or more constraints.

    All violations are collected before raising, so ``violations`` lists
    every problem rather than only the first one found.
    """

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"{len(self.violations)} invalid design input(s):\n{lines}")


class ConfigError(H2PError, ValueError):
    """Malformed configuration file (syntax, unknown or missing keys)."""


class InfeasibleDesignError(H2PError, ValueError):
    """No design meets the target power under the given constraints.

    ``min_feasible_K`` is set when a larger number of clusters would make the
    problem solvable; ``limiting_lambda`` is the noncentrality reached as the
    cluster size grows without bound.
    """

    def __init__(self, message: str, *, min_feasible_K: int | None = None,
                 limiting_lambda: float | None = None):
        super().__init__(message)
        self.min_feasible_K = min_feasible_K
        self.limiting_lambda = limiting_lambda


class NotSupportedError(H2PError, NotImplementedError):
    """The requested method/option combination is not available."""


class SignConstraintError(H2PError, ValueError):
    """Effects point in directions the chosen test cannot handle."""


class ConvergenceError(H2PError, ArithmeticError):
    """A series, quadrature or root search failed to converge."""
