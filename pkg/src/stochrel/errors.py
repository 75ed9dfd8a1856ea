"""Exception types shared across the package.

The split matters for the service/CLI layer: configuration problems map to
exit code 1 (HTTP 422), numerical failures to exit code 2 (HTTP 500).
"""


class StochrelError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(StochrelError):
    """Invalid experiment configuration or violated input invariant."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(StochrelError):
    """A numerical routine failed to reach its requested accuracy."""

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class ProximityError(NumericalError):
    """Two particles came closer than the configured minimum separation."""

    def __init__(self, message, separation=None):
        super().__init__(message)
        self.separation = separation


class SingularityError(NumericalError):
    """Step-size floor exhausted while trying to resolve a close encounter."""

    def __init__(self, message, time=None, separation=None):
        super().__init__(message)
        self.time = time
        self.separation = separation
