"""Exception types shared across the package."""


class QuantdistError(Exception):
    """Base class for all package errors."""


class LexiconError(QuantdistError):
    """Raised when a unit lexicon or currency rate file is malformed."""


class DimensionMismatchError(QuantdistError):
    """Raised when an operation mixes quantities of different dimensions."""


class AnnotationFormatError(QuantdistError):
    """Raised on malformed annotated-corpus input; carries the line number."""

    def __init__(self, message, line_number=None, path=None):
        self.line_number = line_number
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_number is not None:
            where += f"{line_number}: "
        super().__init__(where + message)


class TableFormatError(QuantdistError):
    """Raised when a serialized distribution table cannot be read back."""


class RecordFormatError(QuantdistError):
    """Raised on malformed extraction-record streams; carries the line number."""

    def __init__(self, message, line_number=None, path=None):
        self.line_number = line_number
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_number is not None:
            where += f"{line_number}: "
        super().__init__(where + message)


class ConfigMismatchError(QuantdistError):
    """Raised when tables built under incompatible configurations are merged."""


class DatasetFormatError(QuantdistError):
    """Raised on malformed comparison-dataset rows; carries the line number."""

    def __init__(self, message, line_number=None, path=None):
        self.line_number = line_number
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_number is not None:
            where += f"{line_number}: "
        super().__init__(where + message)


class SplitInfeasibleError(QuantdistError):
    """Raised when a leakage-free split cannot be constructed."""
