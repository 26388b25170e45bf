"""Exception hierarchy for the critical-line toolkit.

Every failure mode a caller is expected to handle gets its own class so the
CLI can map them to diagnostics without string matching.
"""
from __future__ import annotations


class HardyzError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HardyzError, ValueError):
    """Argument outside an operation's declared domain."""


class GammaPoleError(DomainError):
    """log-gamma or digamma requested at a non-positive integer pole."""


class PrecisionError(HardyzError):
    """Requested accuracy cannot be met within configured resource caps."""


class MissedZerosError(HardyzError):
    """Zero count in a window disagrees with the counting formula.

    Carries enough context for the caller to rescan at a finer step.
    """

    def __init__(self, message: str, counted: int, expected: float, slack: float):
        super().__init__(message)
        self.counted = counted
        self.expected = expected
        self.slack = slack


class InterlacingError(HardyzError):
    """A zero gap where the derivative changes sign more than once."""


class SignAmbiguityError(HardyzError):
    """Derivative sign requested at a point indistinguishable from a stationary point."""


class QuadratureError(HardyzError):
    """Adaptive integration failed: tolerance unmet at max depth."""


class NonFiniteIntegrandError(QuadratureError):
    """Integrand returned NaN or Inf inside the integration window."""
