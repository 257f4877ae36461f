"""Exceptions raised by the conicqed numerics."""


class ConicQEDError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ConicQEDError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResonanceError(DomainError):
    """A photon frequency sits on an intermediate-level pole of the D tensor."""

    def __init__(self, message, level_index=None):
        super().__init__(message)
        self.level_index = level_index


class EvaluationError(ConicQEDError, ArithmeticError):
    """An integrand or summand produced NaN or infinity."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(ConicQEDError, RuntimeError):
    """An m-sum reached its hard cap before the truncation rule was met."""

    def __init__(self, message, report=None, context=None):
        super().__init__(message)
        self.report = report
        self.context = context or {}


class UsageError(ConicQEDError):
    """Invalid command-line flag combination."""
