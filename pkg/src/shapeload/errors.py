"""Exception hierarchy shared by all shapeload modules.

Two branches matter to callers: :class:`InputError` (malformed or
inconsistent input data, CLI exit code 2) and :class:`NumericalError`
(degenerate or out-of-domain numeric conditions, CLI exit code 3).
"""


class ShapeLoadError(Exception):
    """Base class for all shapeload errors."""

    exit_code = 1


class InputError(ShapeLoadError):
    """Bad or inconsistent input data."""

    exit_code = 2


class NumericalError(ShapeLoadError):
    """Degenerate data or out-of-domain numeric arguments."""

    exit_code = 3


class MalformedInput(InputError):
    """Input bytes do not parse in the declared format."""


class TooFewPoints(InputError):
    """A plot needs at least two points."""


class NonFiniteValue(InputError):
    """NaN or infinity in coordinates or numeric fields."""


class DuplicateX(InputError):
    """Duplicate x-values under the reject ingest policy."""


class LengthMismatch(InputError):
    """Paired sequences have different lengths."""


class InsufficientData(InputError):
    """Fewer observations than the operation requires."""


class EmptyInput(InputError):
    """An operation received no records."""


class MissingMetric(InputError):
    """A rated plot has no metric value."""


class MissingScore(InputError):
    """A ranked or compared plot has no score."""


class PoolTooSmall(InputError):
    """Selection asked for more plots than the pool holds."""


class InsufficientCandidates(InputError):
    """Equal-interval selections do not cover the requested study size."""


class TooFewGroups(InputError):
    """The rotation design needs at least four groups."""


class ZeroXRange(NumericalError):
    """All x-values equal; the curve cannot be normalized."""


class NegativeMetric(NumericalError):
    """Metric values must be non-negative."""


class DegenerateX(NumericalError):
    """Regressor has zero variance."""


class ZeroVariance(NumericalError):
    """Rank correlation of an all-equal sequence is undefined."""


class InvalidR2(NumericalError):
    """R-squared outside [0, 1) where a finite F statistic is required."""


class CoverageWarning(UserWarning):
    """Non-fatal data-coverage issues (sparse ratings, unrated plots)."""
