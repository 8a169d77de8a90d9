"""Exception types shared across the package.

Keeping these in one place lets the CLI and the HTTP service map failure
modes to exit codes / error payloads without inspecting messages.
"""


class NoiseRadarError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(NoiseRadarError, ValueError):
    """An input violates its documented domain (rho outside [0,1], etc.)."""


class ZeroSignalPowerError(NoiseRadarError):
    """Degenerate data: a channel has zero power, so rho/phi are undefined."""


class PerfectCorrelationError(NoiseRadarError):
    """rho_hat == 1, which makes the GLR statistic infinite."""


class SingularCovarianceError(NoiseRadarError):
    """The model covariance is singular (rho = 1 or a zero sigma)."""


class SeriesConvergenceError(NoiseRadarError):
    """A series evaluation diverged, overflowed, or hit its term cap."""


class QuadratureError(NoiseRadarError):
    """Adaptive integration exceeded its subdivision budget."""


class DegenerateDistributionError(NoiseRadarError):
    """A distribution fit is degenerate (e.g. von Mises fit at rho = 0)."""


class IQFileError(NoiseRadarError, ValueError):
    """An IQ sample file is malformed."""
