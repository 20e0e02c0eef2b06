"""Exception types shared across the package."""

from __future__ import annotations


class ModulusMismatch(ValueError):
    """Two ring elements with different moduli were combined."""


class UnsupportedModulus(ValueError):
    """Operation not defined for this modulus kind."""


class NotInvertible(ArithmeticError):
    """Element is not a unit.

    When the element is a zero divisor, ``witness`` holds a nonzero element
    annihilating it.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class OddOrderEvaluation(ValueError):
    """Evaluation at x = -1 requested for a ring of odd order N.

    The map is not well defined there: the ideal generator does not vanish.
    """


class PreconditionFailed(ValueError):
    """Input violates a documented precondition of the operation."""


class WorkCapExceeded(RuntimeError):
    """An enumeration would exceed the configured candidate cap."""


class VerificationFailure(AssertionError):
    """A property the library promises to re-derive failed to verify.

    Raised instead of silently patching the result.
    """
