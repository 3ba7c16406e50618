"""Exception hierarchy.

Every library error derives from :class:`QReservoirError` and carries a
stable ``category`` slug that the CLI emits in machine-readable error
output and maps to its exit code.
"""

from __future__ import annotations


class QReservoirError(Exception):
    """Base class for all library errors."""

    category = "internal-error"
    exit_code = 1


class ArgumentError(QReservoirError):
    """Invalid argument or configuration value."""

    category = "argument-error"
    exit_code = 2


class SizeLimitError(ArgumentError):
    """Operator dimension would exceed the configured maximum."""

    category = "size-limit-error"


class SiteIndexError(ArgumentError):
    """Subsystem index out of range for the composite system."""

    category = "site-index-error"


class ShapeError(QReservoirError):
    """Dimension mismatch between operands."""

    category = "shape-error"
    exit_code = 2


class RangeError(QReservoirError):
    """Query outside the supported domain (e.g. spline extrapolation)."""

    category = "range-error"
    exit_code = 2


class HermiticityError(QReservoirError):
    """Operator violates a required Hermiticity tolerance."""

    category = "hermiticity-error"
    exit_code = 4


class InvariantError(QReservoirError):
    """A quantum-state invariant (trace, positivity, Hermiticity) failed."""

    category = "invariant-error"
    exit_code = 4


class NumericalError(QReservoirError):
    """Non-finite values or failed numerical routine."""

    category = "numerical-error"
    exit_code = 4


class IntegrationInstabilityError(NumericalError):
    """Time integration drifted beyond tolerance; use more substeps."""

    category = "integration-instability-error"


class SingularSystemError(NumericalError):
    """Normal equations are singular; a positive ridge penalty is required."""

    category = "singular-system-error"


class UndefinedCorrelationError(QReservoirError):
    """Pearson correlation undefined (zero variance input)."""

    category = "undefined-correlation-error"
    exit_code = 4


class DataFormatError(QReservoirError):
    """Malformed input file (bad header, unparseable row)."""

    category = "data-format-error"
    exit_code = 3


class DataError(QReservoirError):
    """Well-formed but invalid data (non-positive price, NaN feature)."""

    category = "data-error"
    exit_code = 3


class IOFailure(QReservoirError):
    """Filesystem failure while reading or writing an artifact."""

    category = "io-error"
    exit_code = 5
