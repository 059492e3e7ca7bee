"""
geometry_errors.py - Exception types for the SO(3) geometry toolkit (v1.0.0)

All library errors derive from SubRiemannianError so callers (and the CLI)
can catch one base class.
"""

from typing import Any, Optional


class SubRiemannianError(Exception):
    """Base class for geometry toolkit errors"""
    pass


class InvalidRotationError(SubRiemannianError):
    """Input matrix is not a rotation within the validation tolerance"""

    def __init__(self, message: str, orthogonality_gap: float = float('nan'),
                 det_gap: float = float('nan')):
        super().__init__(message)
        self.orthogonality_gap = orthogonality_gap
        self.det_gap = det_gap


class NonFiniteParameterError(SubRiemannianError):
    """A geodesic parameter or time is NaN or infinite"""
    pass


class DigonDomainError(SubRiemannianError):
    """t1 lies outside the interval where the projected arc has no self-intersection"""
    pass


class CutSymmetryDomainError(SubRiemannianError):
    """Double-cover identity requested for beta^2 > 1/3"""
    pass


class InsufficientSamplesError(SubRiemannianError):
    """Too few samples for a finite-difference estimate"""
    pass


class NoConvergenceError(SubRiemannianError):
    """Solver residual stayed above tolerance; best candidate attached"""

    def __init__(self, message: str, best: Optional[Any] = None):
        super().__init__(message)
        self.best = best


class RadiusOutOfRangeError(SubRiemannianError):
    """Sphere radius outside (0, pi sqrt(3)]"""
    pass
