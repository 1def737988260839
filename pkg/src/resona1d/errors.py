"""Exception types raised by the solvers."""


class Resona1dError(Exception):
    """Base class for all package errors."""


class SingularGap(Resona1dError):
    """The exterior wavenumber hits k*ell = m*pi for some gap (m != 0)."""


class ResonantModeCollision(Resona1dError):
    """omega + n*Omega vanishes for a retained Fourier mode n."""


class EigenFailure(Resona1dError):
    """An eigen-decomposition did not converge."""


class NoConvergence(Resona1dError):
    """Muller iteration exhausted its iteration budget."""

    def __init__(self, message, last=None, iterations=0):
        super().__init__(message)
        self.last = last
        self.iterations = iterations


class DegenerateParabola(Resona1dError):
    """The three Muller samples carry identical objective values."""


class IntegrationFailure(Resona1dError):
    """The period-map integration could not meet its tolerance."""


class MixedAmplitudes(Resona1dError):
    """First-order asymptotics need one common amplitude for rho and kappa."""


class NotDegenerate(Resona1dError):
    """The requested eigenvalue cluster is not degenerate."""


class ConfigError(Resona1dError):
    """Invalid run configuration; the message names the offending field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
