"""Errors raised by the figure renderer."""


class FigureError(Exception):
    """Base class; carries a short machine-readable code."""

    code = "error"


class SchemaError(FigureError):
    """An input CSV is empty, malformed, or lacks required columns."""

    code = "schema"


class UsageError(FigureError):
    """Bad command line arguments."""

    code = "usage"
