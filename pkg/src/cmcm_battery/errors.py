"""Exception types raised across the package."""


class CMCMError(Exception):
    """Base class for model/runtime errors."""


class NonHermitianInput(CMCMError, ValueError):
    pass


class NonUnitaryInput(CMCMError, ValueError):
    pass


class DimensionOverflow(CMCMError, ValueError):
    pass


class DimensionMismatch(CMCMError, ValueError):
    pass


class OutOfRange(CMCMError, ValueError):
    pass


class InvalidState(CMCMError, ValueError):
    pass


class ZeroProbabilityBranch(CMCMError):
    pass


class TreeTooLarge(CMCMError):
    pass


class MissingTableEntry(CMCMError, KeyError):
    pass


class TableModelMismatch(CMCMError):
    pass


class ConfigError(Exception):
    """Configuration problem; ``line`` is 1-based, or None when not tied to a line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownKey(ConfigError):
    pass


class MissingKey(ConfigError):
    pass


class MalformedValue(ConfigError):
    pass


class ConflictingNoiseForms(ConfigError):
    pass
