"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class TransducerError(Exception):
    """Base class for all errors raised by cantortx."""


class InputError(TransducerError, ValueError):
    """A word, letter or argument is malformed or out of range."""


class AlphabetMismatch(InputError):
    pass


class NonProductiveCycle(TransducerError):
    """Evaluation entered a state cycle that emits nothing."""


class FixpointDivergence(TransducerError):
    """The common-prefix fixpoint grew past its bound (a constant-image state)."""


class BudgetExceeded(TransducerError):
    """A budgeted semi-decision ran out of configurations or depth."""


class EmptyPreimage(TransducerError):
    pass


class NotSurjective(TransducerError):
    pass


class NotInjective(TransducerError):
    pass


class NotSynchronizing(TransducerError):
    pass


class OrderBudgetExceeded(BudgetExceeded):
    pass


class InternalInvariantViolation(TransducerError):
    """A result contradicts a proven guarantee; indicates a bug."""
