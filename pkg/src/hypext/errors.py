"""Exception types shared across the package."""

from __future__ import annotations


class HypextError(Exception):
    """Base class for all errors raised by hypext."""


class InvalidUniformity(HypextError, ValueError):
    pass


class InvalidSize(HypextError, ValueError):
    pass


class VertexRangeError(HypextError, ValueError):
    pass


class InvalidPair(HypextError, ValueError):
    pass


class PreconditionError(HypextError, ValueError):
    """An operation was called outside its documented domain."""


class DesignError(HypextError, ValueError):
    """Design parameters fail the necessary divisibility conditions."""


class HG3FormatError(HypextError, ValueError):
    """Malformed .hg3 input."""


class InvariantViolation(HypextError, RuntimeError):
    """An internal consistency check failed (indicates a bug, not bad input)."""


class BudgetExceeded(HypextError, RuntimeError):
    """An exhaustive search ran out of its node budget.

    Exhaustive searches never fall back to an approximate answer; callers
    either raise this or turn it into an explicit "indeterminate" result.
    """

    def __init__(self, what: str, budget: int, detail: str = ""):
        self.what = what
        self.budget = budget
        self.detail = detail
        msg = f"{what}: node budget {budget} exhausted"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
