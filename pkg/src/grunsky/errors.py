"""Exception hierarchy shared by all modules.

Three failure classes matter to callers (and to the CLI exit codes):
input validation, numerical failure, and invariant violation.  Numerical
failures are always explicit; no routine silently returns a value it
could not certify.
"""

from __future__ import annotations


class GrunskyError(Exception):
    """Base class for all library errors."""


class ValidationError(GrunskyError, ValueError):
    """Malformed or out-of-range input data."""


class OrderUnderflowError(ValidationError):
    """A requested truncation order exceeds what the input data supports."""


class NumericalError(GrunskyError):
    """A numerical procedure failed to converge or lost its certificate."""


class QuadratureError(NumericalError):
    """Adaptive quadrature exhausted its budget before reaching tolerance."""


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap without converging."""


class BranchWindingError(NumericalError):
    """A logarithm branch wound along a sampling loop (radii too small)."""


class InvariantViolation(GrunskyError):
    """Computed data contradicts a structural inequality it must satisfy."""
