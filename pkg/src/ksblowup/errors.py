"""Exception hierarchy.

Every error raised by the library derives from :class:`KSError` and carries a
short machine-readable ``kind`` string that the harness echoes into reports.
"""

from __future__ import annotations


class KSError(ValueError):
    kind = "error"


class InvalidDimensionError(KSError):
    kind = "invalid-dimension"


class DegenerateExponentError(KSError):
    kind = "degenerate-exponent"


class SingularExponentError(KSError):
    kind = "singular-exponent"


class GNInapplicableError(KSError):
    kind = "gn-inapplicable"


class HolderInapplicableError(KSError):
    kind = "holder-inapplicable"


class QTooSmallError(KSError):
    kind = "q-too-small"


class InvalidQError(KSError):
    kind = "invalid-q"


class InadmissibleConfigError(KSError):
    kind = "inadmissible-config"


class InfeasibleEpsilonError(KSError):
    kind = "infeasible-epsilon"


class DivergentIntegralError(KSError):
    kind = "divergent-integral"


class InvalidToleranceError(KSError):
    kind = "invalid-tolerance"


class OutOfDomainError(KSError):
    kind = "out-of-domain"


class InvalidStateError(KSError):
    kind = "invalid-state"


class InsufficientDataError(KSError):
    kind = "insufficient-data"


class GNHypothesisError(KSError):
    kind = "gn-hypothesis-violated"


class ConfigError(KSError):
    """Raised for unparseable or schema-invalid experiment configs."""

    kind = "config-error"

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
