"""Exception hierarchy shared by all modules."""


class RydTriadError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(RydTriadError, ValueError):
    """Missing or inconsistent user configuration (e.g. a quantum defect not set)."""


class ValidationError(RydTriadError, ValueError):
    """Input that violates a structural precondition (non-Hermitian matrix, bad dimensions)."""


class CapacityError(RydTriadError, ArithmeticError):
    """Exact-arithmetic intermediates exceeded the configured size budget."""


class AccuracyError(RydTriadError, ArithmeticError):
    """Numerical refinement did not reach the requested tolerance.

    The achieved error estimate is kept on ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DegeneracyError(RydTriadError):
    """Basis states passed to first-order theory are not degenerate."""


class ResonanceAlarm(RydTriadError):
    """One or more unwanted coupling channels are (near-)resonant.

    ``channels`` holds the offending channels, ``report`` the partially
    filled report when raised from an aggregate check.
    """

    def __init__(self, message, channels=(), report=None):
        super().__init__(message)
        self.channels = list(channels)
        self.report = report


class SchedulingError(RydTriadError, ValueError):
    """Pulses on the same target overlap in time."""
