"""Exception taxonomy shared by every module and mapped to CLI exit codes."""


class DytoError(Exception):
    """Base class for all library errors."""


class StorageError(DytoError):
    """File could not be read or written (I/O level)."""


class FormatError(DytoError):
    """File content does not follow the DYT1 layout."""


class ValidationError(DytoError):
    """Data violates an invariant (non-finite values, zero norms, ...)."""


class InputError(DytoError):
    """An operation precondition on its input does not hold."""


class ConfigError(DytoError):
    """Configuration values are inconsistent or out of range."""


class ScheduleError(DytoError):
    """A merge schedule is infeasible for the tokens it is applied to."""
