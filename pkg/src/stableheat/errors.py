"""Exception types shared across the package."""


class UnsupportedRegimeError(ValueError):
    """A (d, alpha) combination outside the validity range of a formula."""


class MissingParameterError(ValueError):
    """An operation needs a calibrated quantity that was not supplied."""


class InconclusiveError(RuntimeError):
    """A Monte Carlo sweep was too noisy to produce a usable report."""

    def __init__(self, message, required_n=None):
        super().__init__(message)
        self.required_n = required_n


class FitError(RuntimeError):
    """A least-squares exponent fit failed its internal consistency checks."""


class EstimateDiagnostic(RuntimeError):
    """An estimator produced a value incompatible with its known sign/bounds."""
