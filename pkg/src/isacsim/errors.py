"""Exception types shared across the simulator."""


class IsacSimError(Exception):
    """Base class for all simulator errors."""


class DegenerateGeometryError(IsacSimError, ValueError):
    """Raised when a geometric quantity is undefined (coincident points,
    zero propagation distance, ...)."""


class ScenarioConfigError(IsacSimError, ValueError):
    """Raised for invalid or incomplete scenario configuration."""


class UnknownRcsTypeError(IsacSimError, KeyError):
    """Raised when an RCS lookup names an unregistered target type."""


class UndefinedCorrelationError(IsacSimError, ValueError):
    """Raised when a correlation is requested for an empty channel
    component or without the required shared geometry."""
