"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: config errors exit 2,
truncation diagnostics exit 3, path blow-ups exit 4, a failed convergence
verdict exits 5.
"""


class SpdePerturbError(Exception):
    """Base class for package errors."""


class DomainMismatchError(SpdePerturbError):
    """Two spectral values living on different domains were combined."""


class ConfigError(SpdePerturbError):
    """Invalid or malformed run configuration."""


class TruncationError(SpdePerturbError):
    """A truncation-consistency check (doubled mode count) failed."""


class BlowUpError(SpdePerturbError):
    """A simulated path exceeded the blow-up guard threshold."""

    def __init__(self, message, path_index=None, step=None):
        super().__init__(message)
        self.path_index = path_index
        self.step = step
