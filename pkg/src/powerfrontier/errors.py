"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class UndefinedBandError(DomainError):
    """A confidence band cannot be formed (no kernel mass at the point)."""


class DegenerateBandwidthError(DomainError):
    """The bandwidth rule produced a non-positive window (constant covariate)."""


class DataError(ValueError):
    """Malformed input data. ``line`` is the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
