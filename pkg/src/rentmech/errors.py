"""Exception types. Validation problems subclass ``ValueError`` so callers can
catch them generically; ``InvariantError`` marks an internal consistency
failure (CLI exit code 2)."""


class RentmechError(Exception):
    pass


class ConfigError(RentmechError, ValueError):
    """Bad or inconsistent configuration; ``path`` locates the offending field."""

    def __init__(self, message, path=""):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class EmptyIntervalError(RentmechError, ValueError):
    pass


class SingularVirtualValueError(RentmechError, ValueError):
    pass


class HorizonTooSmallError(RentmechError, ValueError):
    pass


class RewardClassError(RentmechError, ValueError):
    pass


class NotIIDError(RentmechError, ValueError):
    pass


class IRViolationError(RentmechError, ValueError):
    pass


class SizeBoundError(RentmechError, ValueError):
    pass


class InvariantError(RentmechError):
    pass
