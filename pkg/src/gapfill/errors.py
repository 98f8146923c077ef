"""Exception hierarchy shared across gapfill modules."""


class GapfillError(Exception):
    """Base class for every error raised by gapfill."""


class DataError(GapfillError, ValueError):
    """Input data cannot be used as given (CLI exit code 2)."""


class ConfigError(GapfillError, ValueError):
    """Invalid configuration or arguments (CLI exit code 1)."""


class ParseError(DataError):
    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.row = row
        self.column = column


class EmptyInputError(DataError):
    pass


class UnsupportedInputError(DataError):
    pass


class GapRangeError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class DomainError(DataError):
    """A value lies outside the domain of an encoding function."""


class NoSourceError(DataError):
    """The inpainter has no usable source patch."""


class ExtractionError(DataError):
    pass


class SelectionError(DataError):
    pass


class PipelineError(DataError):
    """Every transform family failed during a hinge run."""
