class BigMeansError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(BigMeansError, ValueError):
    """Invalid parameters: impossible budgets, chunk larger than the data, unknown ids."""


class InvalidStateError(BigMeansError, RuntimeError):
    """An operation was asked to work on a centroid set with no usable rows."""


class IncompleteInputError(BigMeansError, ValueError):
    pass


class ParseError(BigMeansError, ValueError):
    """A dataset file could not be parsed.

    ``line`` and ``column`` are 1-based and refer to the offending cell.
    """

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
