"""Exception hierarchy shared across the package."""


class SdklError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SdklError):
    """An input lies outside the declared outcome or parameter domain."""


class IntegrationFailure(SdklError):
    """Quadrature did not reach the requested tolerance within budget.

    Carries the achieved error estimate so callers can report diagnostics.
    """

    def __init__(self, message, err_estimate=None):
        super().__init__(message)
        self.err_estimate = err_estimate


class DegenerateLocalization(SdklError):
    """The complement of the localization ball carries (numerically) no mass."""


class DegenerateScenario(SdklError):
    """A scenario violates a strict hypothesis (e.g. vanishing expected score)."""


class ConfigError(SdklError):
    """A run configuration file failed to parse or validate."""
