"""Figure construction from validated tables.

Line roles, not pixel geometry: grey curves are the classical reference,
solid curves the symmetric branch, dash-dotted curves the broken branches,
dashed curves the perturbative prediction or photon number.  Everything
that could make reruns differ (hash salt, timestamps, autosized layout) is
pinned so rendering is a pure file-to-file function.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvdata import MARGINAL_COLUMNS, SWEEP_COLUMNS, Table
from .errors import SchemaError

_RC = {
    "svg.hashsalt": "dopo-figures",
    "figure.figsize": (8.0, 6.0),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.25,
    "lines.linewidth": 1.3,
}

_METHOD_COLOR = {
    "classical": "0.65",
    "self-consistent": "black",
    "drummond": "tab:red",
}
_BRANCH_STYLE = {"below": "-", "above_plus": "-.", "above_minus": "-."}


_VALUE_COLUMNS = tuple(
    name for name in SWEEP_COLUMNS if name not in ("method", "branch", "error")
)


def _series(tables: list[Table]):
    """Rows of all sweep tables grouped by (method, branch), drive-sorted.

    Error rows carry no values and are dropped.
    """
    groups: dict[tuple[str, str], list[tuple[float, dict[str, float]]]] = {}
    for table in tables:
        table.require(SWEEP_COLUMNS)
        methods = table.text("method")
        branches = table.text("branch")
        errors = table.text("error")
        columns = {name: table.column(name) for name in _VALUE_COLUMNS}
        for i in range(len(methods)):
            if errors[i]:
                continue
            key = (methods[i], branches[i])
            point = {name: col[i] for name, col in columns.items()}
            groups.setdefault(key, []).append((point["sigma"], point))
    if not groups:
        raise SchemaError("no usable sweep rows in the inputs")
    out = {}
    for key in sorted(groups):
        rows = sorted(groups[key], key=lambda item: item[0])
        out[key] = {
            name: np.array([point[name] for _, point in rows])
            for name in _VALUE_COLUMNS
        }
    return out


def _plot_series(ax, series, value, skip_methods=()):
    for (method, branch), cols in series.items():
        if method in skip_methods:
            continue
        values = cols[value]
        keep = np.isfinite(values)
        if not keep.any():
            continue
        ax.plot(
            cols["sigma"][keep], values[keep],
            linestyle=_BRANCH_STYLE.get(branch, "--"),
            color=_METHOD_COLOR.get(method, "tab:blue"),
            label=f"{method} {branch}".strip(),
        )


def render_fig1ab(tables: list[Table]):
    """Stacked panels: pump and signal intensity against the drive."""
    series = _series(tables)
    fig, (ax_pump, ax_signal) = plt.subplots(2, 1, sharex=True)
    _plot_series(ax_pump, series, "pump_intensity")
    ax_pump.set_ylabel("pump intensity")
    _plot_series(ax_signal, series, "signal_intensity",
                 skip_methods=("drummond",))
    # dashed overlay: total signal photons (coherent plus fluctuations)
    for (method, branch), cols in series.items():
        if method != "self-consistent":
            continue
        photons = cols["signal_photons_norm"]
        keep = np.isfinite(photons)
        ax_signal.plot(cols["sigma"][keep], photons[keep],
                       linestyle="--", color="black", linewidth=0.9,
                       label=f"photons {branch}")
    ax_signal.set_ylabel("signal intensity")
    ax_signal.set_xlabel("sigma")
    ax_pump.legend(loc="best", fontsize=7)
    return fig


def render_fig1cd(tables: list[Table]):
    """Stacked panels: both quadrature variances against the drive."""
    series = _series(tables)
    fig, (ax_x, ax_y) = plt.subplots(2, 1, sharex=True)
    _plot_series(ax_x, series, "var_x")
    ax_x.set_yscale("log")
    ax_x.set_ylabel("var x")
    _plot_series(ax_y, series, "var_y")
    ax_y.set_ylabel("var y")
    ax_y.set_xlabel("sigma")
    ax_x.legend(loc="best", fontsize=7)
    return fig


def _marginal_panels(tables: list[Table]) -> tuple[list[Table], Table]:
    plus: list[Table] = []
    minus: list[Table] = []
    for table in tables:
        table.require(MARGINAL_COLUMNS)
        axis = table.comment_value("axis")
        if axis == "x_plus":
            plus.append(table)
        elif axis == "x_minus":
            minus.append(table)
        else:
            raise SchemaError(f"{table.path}: missing or unknown axis comment")
    if len(plus) != 5 or len(minus) != 1:
        raise SchemaError(
            "expected five x_plus marginal files and one x_minus file, got "
            f"{len(plus)} and {len(minus)}"
        )
    plus.sort(key=lambda t: t.drive_value())
    return plus, minus[0]


def _draw_marginal(ax, table: Table, xlabel: str, ylabel: str) -> None:
    grid = table.column("x")
    ax.plot(grid, table.column("exact"), "-", color="black", label="exact")
    for name, style in (("gauss_below", "--"), ("gauss_above", "-.")):
        overlay = table.column(name)
        keep = np.isfinite(overlay)
        if keep.any():
            ax.plot(grid[keep], overlay[keep], style, color="0.5", label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"sigma = {table.drive_value():.6g}", fontsize=8)


def render_fig2(tables: list[Table]):
    """Six marginal panels: five amplitude-axis densities, one squeezed."""
    plus, minus = _marginal_panels(tables)
    fig, axes = plt.subplots(2, 3, figsize=(10.0, 6.0))
    flat = axes.ravel()
    for ax, table in zip(flat[:5], plus):
        _draw_marginal(ax, table, "x plus", "density")
    _draw_marginal(flat[5], minus, "x minus", "density")
    flat[0].legend(loc="best", fontsize=7)
    return fig


_RENDERERS = {
    "fig1ab": render_fig1ab,
    "fig1cd": render_fig1cd,
    "fig2": render_fig2,
}


def render_figure(figure_id: str, tables: list[Table], out_base: str) -> list[str]:
    """Build one figure and write both image formats.

    Returns the written paths.  The SVG is stripped of its creation date
    so identical inputs give identical bytes.
    """
    with plt.rc_context(_RC):
        fig = _RENDERERS[figure_id](tables)
        fig.set_layout_engine("tight")
        written = []
        for suffix, metadata in ((".png", None), (".svg", {"Date": None})):
            path = out_base + suffix
            fig.savefig(path, metadata=metadata)
            written.append(path)
        plt.close(fig)
    return written
