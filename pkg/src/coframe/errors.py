"""Exception hierarchy shared by every module."""


class CoframeError(Exception):
    """Base class for all errors raised by this package."""


class SingularChartError(CoframeError):
    """A point lies within the singularity margin of the chart poles."""


class EvaluationError(CoframeError):
    """A field could not be evaluated (e.g. a vanishing denominator)."""


class DegreeError(CoframeError):
    """An operation received forms of an unsupported degree."""


class InconsistentSystemError(CoframeError):
    """The pinned connection system has no solution."""


class IllConditionedError(CoframeError):
    """The pointwise connection system is numerically singular."""


class NonFiniteError(CoframeError):
    """A quadrature node produced a non-finite integrand value."""


class ConfigError(CoframeError):
    """Invalid run configuration."""
