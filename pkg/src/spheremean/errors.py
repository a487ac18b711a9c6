class SpheremeanError(ValueError):
    """Base class of every error raised by the package."""


class DomainError(SpheremeanError):
    """Argument outside the mathematical domain of the operation."""


class DimensionError(SpheremeanError):
    """Unsupported space dimension."""


class AliasingError(SpheremeanError):
    """Requested harmonic degree is beyond the exact band of the grid."""


class GridError(SpheremeanError):
    """Grid too coarse or not covering the required support."""


class WidthError(SpheremeanError):
    """Derivative row would need entries beyond the requested width."""


class ConditioningError(SpheremeanError):
    """Linear system too ill-conditioned to be trusted.

    Parameters
    ----------
    message
        Error message.
    cond
        Condition number of the offending system.

    """

    def __init__(self, message: str, cond: float) -> None:
        super().__init__(f"{message} (condition number {cond:.3e})")
        self.cond = cond


class InputError(SpheremeanError):
    """Malformed input file.

    Parameters
    ----------
    message
        Error message.
    where
        Field name or line number that triggered the error.

    """

    def __init__(self, message: str, where: str | int | None = None) -> None:
        if where is not None:
            message = f"{message} [at {where}]"
        super().__init__(message)
        self.where = where
