"""Error types shared across the package.

The split matters for the command line driver: configuration problems
(bad schema, parameters violating a lemma hypothesis, invalid geometry
declarations) map to exit code 2, while numerical check failures map to
exit code 1.
"""


class QgevreyError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(QgevreyError):
    """Arguments violate a documented precondition or invariant."""


class ConfigError(ValidationError):
    """A scenario config file is malformed or inconsistent.

    Carries a dotted location string (e.g. ``problem.rhs[0].dt_order``)
    so the driver can point at the offending key.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{message} (at {location})"
        super().__init__(message)


class HypothesisError(ValidationError):
    """A parameter violates the hypothesis of the statement being tested."""


class DomainTooSmallError(ValidationError):
    """A per-index check was requested on a range too short to be meaningful."""


class DataError(ValidationError):
    """Numerical input data is out of the valid range (e.g. negative norms)."""


class EmptyGridError(QgevreyError):
    """Every sampling node of a grid was excluded; no estimate is possible."""


class GeometryError(QgevreyError):
    """A point or path violates the declared sector geometry."""


class WrongSectorError(GeometryError):
    """A point lies outside the sector an operation was asked to work in."""


class SingularityError(QgevreyError):
    """Evaluation was requested too close to a known singularity."""

    def __init__(self, message, pole=None):
        self.pole = pole
        super().__init__(message)


class DivergenceError(QgevreyError):
    """A Laplace integral does not satisfy the kernel decay condition."""


class FlatnessError(QgevreyError):
    """Data that must vanish rapidly at the origin fails to do so."""


class ResourceError(QgevreyError):
    """A configured resource cap (term count, magnitude) was exceeded."""


class TruncationError(ValidationError):
    """A series truncation order is too small for the requested operation."""
