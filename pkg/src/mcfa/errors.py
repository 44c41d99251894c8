"""Shared exception and warning types."""


class TopologyError(ValueError):
    """A topology violates a physical feasibility constraint."""


class ConfigError(ValueError):
    """A scenario configuration file is missing, malformed, or inconsistent."""


class NumericalError(RuntimeError):
    """A solver produced a non-finite value or a numerically singular system."""


class UnderResolvedWarning(UserWarning):
    """A time step is too coarse to resolve the fastest hitting-rate kernel."""


class ModelBreakdownWarning(UserWarning):
    """The center-point interference model returned a physically implausible
    value (e.g., a negative asymptotic count), typically for receivers packed
    closely together."""
