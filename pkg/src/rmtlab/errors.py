"""Exception hierarchy shared by all rmtlab modules."""


class RmtLabError(Exception):
    """Base class for every error raised by rmtlab."""


class ConfigurationError(RmtLabError, ValueError):
    """Invalid distribution, ensemble or experiment parameters."""


class DomainError(RmtLabError, ValueError):
    """Argument outside the domain where an operation is defined."""


class EdgeRegimeError(DomainError):
    """A bulk formula was asked about an index too close to the spectral edge."""


class SamplingError(RmtLabError, RuntimeError):
    """A rejection sampler exhausted its attempt budget."""

    def __init__(self, message, acceptance_rate=None):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate


class NumericError(RmtLabError, ArithmeticError):
    """Non-finite input, non-convergence or an integrator blow-up."""


class OracleError(RmtLabError, RuntimeError):
    """A reference computation failed its own self-convergence check."""
