"""Exception and warning types shared across the package."""


class QfpSimError(Exception):
    """Base class for all errors raised by qfp_sim."""


class InvalidDimension(QfpSimError, ValueError):
    pass


class DimensionBudgetExceeded(QfpSimError, ValueError):
    pass


class DimensionMismatch(QfpSimError, ValueError):
    pass


class NotHermitian(QfpSimError, ValueError):
    pass


class InvalidSubsystem(QfpSimError, ValueError):
    pass


class InvalidTime(QfpSimError, ValueError):
    pass


class InvalidBasis(QfpSimError, ValueError):
    pass


class ConfigError(QfpSimError, ValueError):
    pass


class SweepPointError(QfpSimError, RuntimeError):
    """A grid point failed; carries the offending parameter record."""

    def __init__(self, message, record):
        super().__init__(f"{message} (at {record})")
        self.record = record


class TruncationWarning(UserWarning):
    """Fock truncation may be too small for the requested amplitude."""


class RegimeWarning(UserWarning):
    """An approximation is used outside the regime it was derived for."""


class DegenerateDoublet(UserWarning):
    """A 2x2 block is exactly degenerate; the mixing angle is set to zero."""


class TruncationRisk(TruncationWarning):
    """A displacement is large compared with the Fock cutoff."""
