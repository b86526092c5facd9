"""Figure rendering for dopo-lab CSV output."""
from .csvdata import MARGINAL_COLUMNS, SWEEP_COLUMNS, Table, read_table
from .errors import FigureError, SchemaError, UsageError
from .render import render_fig1ab, render_fig1cd, render_fig2, render_figure

__version__ = "0.1.0"

__all__ = [
    "MARGINAL_COLUMNS",
    "SWEEP_COLUMNS",
    "Table",
    "read_table",
    "FigureError",
    "SchemaError",
    "UsageError",
    "render_fig1ab",
    "render_fig1cd",
    "render_fig2",
    "render_figure",
    "__version__",
]
