"""Exception hierarchy shared by every hcan module."""


class HcanError(Exception):
    """Base class for all hcan errors."""


class DimensionError(HcanError, ValueError):
    """Operand shapes are incompatible."""


class DomainError(HcanError, ValueError):
    """Argument outside a function's domain (e.g. digamma at x <= 0)."""


class NumericError(HcanError, ArithmeticError):
    """NaN or non-finite values where finite ones are required."""


class UsageError(HcanError, RuntimeError):
    """API misuse, e.g. calling backward() on a non-scalar."""


class ContractViolation(HcanError, ValueError):
    """Input breaks a documented precondition."""


class LabelError(HcanError, ValueError):
    """Malformed class labels or one-hot encodings."""


class DataError(HcanError, ValueError):
    """Bad input data (empty channels, NaNs, constant channels)."""


class ConfigError(HcanError, ValueError):
    """Invalid configuration values."""


class IngestionError(DataError):
    """CSV parsing failure; carries the offending line and column."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class TrainingError(HcanError, RuntimeError):
    """Training diverged (NaN/inf loss)."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class SnapshotFormatError(HcanError, ValueError):
    """Snapshot file is corrupted or from an unsupported format version."""


class CompatibilityError(HcanError, ValueError):
    """Snapshot does not match the data or configuration it is used with."""
