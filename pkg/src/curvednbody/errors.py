"""Exception taxonomy shared across the package."""

from __future__ import annotations


class CurvedNBodyError(Exception):
    """Base class for all package-specific errors."""


class NonProjectableError(CurvedNBodyError):
    """Point cannot be rescaled onto the surface (kappa * (p . p) <= 0)."""


class KernelDomainError(CurvedNBodyError):
    """Kernel evaluated outside its domain (bad chord or nonpositive base)."""


class CoincidentAngleError(CurvedNBodyError):
    """Two polygon angles coincide modulo a full turn."""


class SingularConfigurationError(CurvedNBodyError):
    """A pair denominator fell below the singularity threshold."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class ConstraintDriftError(CurvedNBodyError):
    """Constraint residual exceeded the configured drift bound."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class NoBalanceError(CurvedNBodyError):
    """No nonnegative angular rate balances the radial force equation."""


class RegularPolygonError(CurvedNBodyError):
    """Certification was asked for a regular polygon, which it excludes."""


class AmbiguousGroupingError(CurvedNBodyError):
    """Float-mode c values fall inside the grouping tolerance band."""


class InternalConsistencyError(CurvedNBodyError):
    """A structural fact the case analysis relies on failed to hold."""


class DisagreementError(InternalConsistencyError):
    """Case analysis and the independent feasibility search disagree."""


class ConfigError(CurvedNBodyError):
    """A run configuration field is missing or invalid."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config error: {field}: {message}")
        self.field = field
