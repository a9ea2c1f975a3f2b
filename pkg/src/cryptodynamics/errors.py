"""Exception hierarchy shared by all analysis modules.

Exit-code mapping used by the CLI: InputError/ConfigError -> 1,
NumericalError -> 2, OS-level I/O failures -> 3.
"""


class AnalysisError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AnalysisError):
    """Invalid input data: malformed files, bad shapes, unusable values."""


class ConfigError(InputError):
    """Invalid configuration or parameter choice."""


class GapError(InputError):
    """Date axis has missing calendar days."""

    def __init__(self, missing_dates):
        self.missing_dates = list(missing_dates)
        shown = ", ".join(str(d) for d in self.missing_dates[:10])
        more = "" if len(self.missing_dates) <= 10 else f" (+{len(self.missing_dates) - 10} more)"
        super().__init__(f"date axis is not contiguous; missing: {shown}{more}")


class EmptyPanelError(InputError):
    """No asset survived alignment."""


class ParseError(InputError):
    """CSV cell could not be parsed; names the offending row/column."""

    def __init__(self, path, row, column, detail):
        self.path = path
        self.row = row
        self.column = column
        super().__init__(f"{path}: row {row}, column {column!r}: {detail}")


class DegenerateDataError(InputError):
    """Data is degenerate for the requested operation (e.g. zero variance)."""


class NumericalError(AnalysisError):
    """A numerical routine failed to converge or produced invalid output."""


class TransportError(AnalysisError):
    """HTTP fetch failed at the transport level."""

    def __init__(self, url, status=None, detail=""):
        self.url = url
        self.status = status
        msg = f"fetch failed for {url}"
        if status is not None:
            msg += f" (HTTP {status})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SchemaError(AnalysisError):
    """Fetched payload does not match the expected CSV schema."""
