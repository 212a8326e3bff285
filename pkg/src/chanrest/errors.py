"""Exception hierarchy shared by all chanrest modules."""


class ChanrestError(Exception):
    """Base class for every error raised by this package."""


class NotCompliantError(ChanrestError, ValueError):
    """A trace violates FIFO channel compliance where compliance is required."""


class InvalidMscError(ChanrestError, ValueError):
    """Per-process event sequences do not form a valid FIFO prefix MSC."""


class ParseError(ChanrestError, ValueError):
    """Malformed input text.  ``line``/``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)


class ValidationError(ChanrestError, ValueError):
    """Well-formed input that violates a semantic side condition."""


class DisabledActionError(ChanrestError):
    """A CSM step was requested that no machine can currently perform."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class ResourceLimitError(ChanrestError):
    """A configured node/state ceiling was exceeded."""
