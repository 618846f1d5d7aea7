"""Exception types shared across the library."""


class DegenerateDataError(ValueError):
    """Input data admits no meaningful solution (e.g. all points identical)."""


class DivergenceError(RuntimeError):
    """Optimization produced non-finite coordinates."""


class CsvFormatError(ValueError):
    """A CSV file could not be parsed; the message names the offending row/column."""
