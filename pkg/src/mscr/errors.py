"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class MSCRError(Exception):
    """Base class for all errors raised by this package."""


class FieldError(MSCRError, ValueError):
    """Invalid field description or mixed-field operands."""


class ZeroInverseError(MSCRError, ZeroDivisionError):
    """Attempt to invert the zero element."""


class SingularMatrix(MSCRError, ArithmeticError):
    """A square system has rank below its dimension."""


class InconsistentSystem(MSCRError, ArithmeticError):
    """A (possibly non-square) linear system has no solution."""


class ParameterError(MSCRError, ValueError):
    """Code parameters violate the MSCR relations."""


class FieldUnsuitable(MSCRError):
    """The chosen field / generator yields a singular recovery system.

    ``failure`` records which repair scenario failed, e.g. ``(2, 3)`` for a
    pair repair or ``(4,)`` for a single-device repair.
    """

    def __init__(self, message: str, failure: tuple[int, ...] = (), helpers: tuple[int, ...] = ()):
        super().__init__(message)
        self.failure = failure
        self.helpers = helpers


class SingularInterference(MSCRError, ArithmeticError):
    """A helper's interference matrix is not invertible."""


class NoAlignedCoordination(MSCRError, ArithmeticError):
    """No coordination row aligns the interference at the receiver."""


class SingularRecovery(MSCRError, ArithmeticError):
    """The recovery system of a repaired device is rank deficient."""


class SearchSpaceTooLarge(MSCRError):
    """Exhaustive search would exceed the configured candidate budget."""


class ClusterError(MSCRError, RuntimeError):
    """Invalid operation on a simulated cluster."""


class BlockFileError(MSCRError, ValueError):
    """Malformed or incompatible block file."""
