"""Exception types shared across the package."""

from __future__ import annotations


class PreschError(ValueError):
    """Base class; carries the offending point when there is one."""

    def __init__(self, message: str, point: complex | None = None):
        if point is not None:
            message = f"{message} (at z={complex(point)})"
        super().__init__(message)
        self.point = point


class DomainError(PreschError):
    """Evaluation point lies outside (or on the boundary of) the domain."""


class SingularityError(PreschError):
    """Evaluation point is at, or too close to, a declared singular point."""


class NotSensePreservingError(PreschError):
    """Jacobian is non-positive, or |dilatation| >= 1."""


class ParameterError(PreschError):
    """A constructor or operation parameter is out of range."""
