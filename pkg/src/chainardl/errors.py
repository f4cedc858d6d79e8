"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`ChainArdlError`, so callers (and the CLI) can map failures to exit
codes by family.
"""

from __future__ import annotations


class ChainArdlError(Exception):
    """Base class for all package errors."""


class ConfigError(ChainArdlError, ValueError):
    """Invalid run configuration."""


class DataError(ChainArdlError, ValueError):
    """Problem with input data: parsing, schema, alignment, gaps."""


class ParseError(DataError):
    def __init__(self, path, line: int, column: str, value: str, what: str = "value"):
        self.path = str(path)
        self.line = line
        self.column = column
        self.value = value
        super().__init__(
            f"{self.path}, line {line}, column {column!r}: cannot parse {what} {value!r}"
        )


class SchemaError(DataError):
    pass


class AlignmentError(DataError):
    pass


class ConstructionError(DataError):
    pass


class DataGapError(DataError):
    def __init__(self, message: str, dates=()):
        self.dates = list(dates)
        super().__init__(message)


class EstimationError(ChainArdlError, ValueError):
    """Numerical estimation cannot proceed."""


class InsufficientDataError(EstimationError):
    pass


class CollinearityError(EstimationError):
    def __init__(self, message: str, columns=()):
        self.columns = list(columns)
        super().__init__(message)


class DegenerateSeriesError(EstimationError):
    pass


class NoErrorCorrectionError(EstimationError):
    pass


class SelectionError(EstimationError):
    pass


class IntegrationOrderError(ChainArdlError):
    """A series is integrated of order two or higher."""

    def __init__(self, series):
        self.series = list(series)
        names = ", ".join(self.series)
        super().__init__(f"series integrated of order I(2) or higher: {names}")


class MonteCarloError(ChainArdlError, RuntimeError):
    pass
