"""
Error types raised by the semireal package.

Every domain error derives from :class:`SemirealError`, itself a ``ValueError``,
so code that guards calls with ``except ValueError`` keeps working.
"""
from __future__ import annotations
from typing import Any, Optional


class SemirealError(ValueError):
    """Base class of all domain errors."""


class PendingError(SemirealError):
    """A lazily evaluated stream could not produce its next term within its stall guard."""


class NonIncreasingError(SemirealError):
    """A sequence presentation decreased (or failed to increase where required) at ``index``."""

    def __init__(self, index: int, message: Optional[str] = None):
        self.index = index
        super().__init__(message or f"Sequence is not increasing at index {index}")


class NegativeTermError(SemirealError):
    """A series term after the starting point was negative."""

    def __init__(self, index: int, value: Any = None):
        self.index = index
        super().__init__(f"Series term {index} is negative: {value}")


class DominationViolated(SemirealError):
    """The first index where u_i > v_i."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Domination u_i <= v_i violated at index {index}")


class InvariantBroken(SemirealError):
    """A construction detected that its running invariant no longer holds."""


class LengthBudgetExceeded(SemirealError):
    """The running total length of a cover passed its declared budget."""


class StrategyOverspent(SemirealError):
    """A strategy tried to predict after spending its whole epsilon."""


class WeightOverflow(SemirealError):
    """The selected terms of a W-set weigh at least epsilon."""


class DensityViolated(SemirealError):
    """An interval does not carry enough weight for the union bound."""

    def __init__(self, interval: Any, weight: Any = None, required: Any = None):
        self.interval = interval
        super().__init__(
            f"Interval {interval} has weight {weight}, needs at least {required}"
        )


class RedundancyLoopGuard(SemirealError):
    """Redundant-interval elimination exceeded its iteration guard."""


class PrefixFreeViolation(SemirealError):
    """Program ``p`` is a prefix of program ``q``."""

    def __init__(self, p: str, q: str):
        self.p = p
        self.q = q
        super().__init__(f"Program '{p}' is a prefix of program '{q}'")


class KraftViolation(SemirealError):
    """The Kraft sum of a machine exceeds 1."""


class LimitInconsistent(SemirealError):
    """An approximation exceeded the supplied limit."""

    def __init__(self, index: int, value: Any = None, limit: Any = None):
        self.index = index
        super().__init__(f"Approximation {index} = {value} exceeds the limit {limit}")


class RowNotFinite(SemirealError):
    """A double series has a nonzero term outside its declared row support."""

    def __init__(self, row: int, column: int):
        self.row = row
        self.column = column
        super().__init__(f"Row {row} has a nonzero term at column {column} outside its support")


class SumMismatch(SemirealError):
    """Two series handed to the mesh refinement do not share the declared sum."""


class FileFormatError(SemirealError):
    """A data file line could not be parsed."""

    def __init__(self, path: str, line: int, message: str = "malformed line"):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")
