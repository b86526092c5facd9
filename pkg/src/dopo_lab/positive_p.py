"""Exact stationary phase-space distribution in the adiabatic limit.

When the pump relaxes much faster than the signal it can be eliminated,
and the signal's stationary distribution over a doubled phase space
``(amp, conj_amp)`` is known in closed form: a product of two power-law
factors confined to a square, times a coupling term.  Everything observable
follows by quadrature, with no linearization anywhere, which makes this
module the exactness benchmark for the Gaussian treatments.

Marginals are taken along the rotated axes

* ``x_plus  = amp + conj_amp``  - distributed like the amplitude quadrature
* ``x_minus = amp - conj_amp``  - a compact direction whose variance equals
  one minus the phase quadrature variance

Both marginal densities are normalized against the full two-dimensional
mass, so their integrals measure nothing but grid quality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarginalError, EmptySupportError, GridMismatchError
from .params import NormalizedParams

# Coarse scan shape used to find the region that carries weight.
_COARSE_PLUS = 1601
_COARSE_MINUS = 801
# Keep everything within this log-weight drop from the maximum.
_LOG_WINDOW = 80.0

_AXES = ("x_plus", "x_minus")


def support_halfwidth(params: NormalizedParams) -> float:
    """Half-width of the square support in the unrotated coordinates."""
    if params.drive <= 0.0:
        raise EmptySupportError("the stationary distribution needs positive drive")
    return math.sqrt(2.0 * params.drive) / params.coupling


def log_density(
    amp: np.ndarray, conj_amp: np.ndarray, params: NormalizedParams
) -> np.ndarray:
    """Unnormalized log of the stationary distribution.

    Minus infinity outside the square support.  Inputs broadcast.
    """
    cap = support_halfwidth(params) ** 2
    power = -1.0 + 2.0 / params.coupling**2
    amp = np.asarray(amp, dtype=float)
    conj_amp = np.asarray(conj_amp, dtype=float)
    da = cap - amp * amp
    db = cap - conj_amp * conj_amp
    inside = (da > 0.0) & (db > 0.0)
    out = np.full(np.broadcast(da, db).shape, -np.inf)
    da_b, db_b = np.broadcast_arrays(da, db)
    amp_b, conj_b = np.broadcast_arrays(amp, conj_amp)
    out[inside] = (
        power * (np.log(da_b[inside]) + np.log(db_b[inside]))
        + 2.0 * amp_b[inside] * conj_b[inside]
    )
    return out


def _log_density_rotated(
    x_plus: np.ndarray, x_minus: np.ndarray, params: NormalizedParams
) -> np.ndarray:
    amp = 0.5 * (x_plus + x_minus)
    conj_amp = 0.5 * (x_plus - x_minus)
    return log_density(amp, conj_amp, params)


def _weight_window(params: NormalizedParams) -> tuple[float, float]:
    """Half-widths along the rotated axes that contain all the weight.

    A coarse scan finds where the log density is within a fixed drop of
    its maximum; the fine quadrature stays inside that box, padded by two
    coarse cells.
    """
    half_diag = 2.0 * support_halfwidth(params)
    edge = half_diag * (1.0 - 1e-9)
    xp = np.linspace(-edge, edge, _COARSE_PLUS)
    xm = np.linspace(-edge, edge, _COARSE_MINUS)
    lp = _log_density_rotated(xp[:, None], xm[None, :], params)
    top = lp.max()
    keep = lp >= top - _LOG_WINDOW
    rows = np.flatnonzero(keep.any(axis=1))
    cols = np.flatnonzero(keep.any(axis=0))
    pad_p = 2 * (xp[1] - xp[0])
    pad_m = 2 * (xm[1] - xm[0])
    wp = min(max(abs(xp[rows[0]]), abs(xp[rows[-1]])) + pad_p, half_diag)
    wm = min(max(abs(xm[cols[0]]), abs(xm[cols[-1]])) + pad_m, half_diag)
    return wp, wm


@dataclass(frozen=True)
class MarginalCurve:
    """A one-dimensional density sampled on a grid."""

    axis: str
    grid: np.ndarray
    density: np.ndarray
    drive: float
    coupling: float

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.density, self.grid))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.trapezoid((self.grid - mu) ** 2 * self.density, self.grid))

    def mode_locations(self, rel_height: float = 1e-3) -> np.ndarray:
        """Positions of strict local maxima above a relative height floor."""
        d = self.density
        floor = rel_height * d.max()
        inner = (d[1:-1] > d[:-2]) & (d[1:-1] >= d[2:]) & (d[1:-1] >= floor)
        return self.grid[1:-1][inner]


def _check_axis(axis: str) -> None:
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")


def marginal_curve(
    params: NormalizedParams,
    axis: str = "x_plus",
    grid: np.ndarray | None = None,
    resolution: int = 2048,
) -> MarginalCurve:
    """Exact marginal density along a rotated axis.

    The two-dimensional density is evaluated on an adaptive box at the
    given resolution and integrated across the other axis; the result is
    normalized by the total two-dimensional mass.  With ``grid`` given the
    curve is interpolated onto it (zero outside the computed box).
    """
    _check_axis(axis)
    wp, wm = _weight_window(params)
    xp = np.linspace(-wp, wp, resolution)
    xm = np.linspace(-wm, wm, resolution)
    lp = _log_density_rotated(xp[:, None], xm[None, :], params)
    w = np.exp(lp - lp.max())
    mass = np.trapezoid(np.trapezoid(w, xm, axis=1), xp)
    if axis == "x_plus":
        native_grid = xp
        density = np.trapezoid(w, xm, axis=1) / mass
    else:
        native_grid = xm
        density = np.trapezoid(w, xp, axis=0) / mass
    if grid is not None:
        grid = np.asarray(grid, dtype=float)
        density = np.interp(grid, native_grid, density, left=0.0, right=0.0)
        native_grid = grid
    return MarginalCurve(
        axis=axis,
        grid=native_grid,
        density=density,
        drive=params.drive,
        coupling=params.coupling,
    )


def normal_ordered_moment(
    params: NormalizedParams,
    conj_power: int,
    power: int,
    resolution: int = 2048,
) -> float:
    """Normally ordered signal moment from the exact distribution.

    ``conj_power`` counts creation operators, ``power`` annihilation
    operators; the doubled phase space turns the expectation into a plain
    weighted integral.  Amplitudes are unscaled, so moments are in photon
    units.
    """
    if conj_power < 0 or power < 0:
        raise ValueError("operator powers must be nonnegative")
    wp, wm = _weight_window(params)
    xp = np.linspace(-wp, wp, resolution)
    xm = np.linspace(-wm, wm, resolution)
    lp = _log_density_rotated(xp[:, None], xm[None, :], params)
    w = np.exp(lp - lp.max())
    amp = 0.5 * (xp[:, None] + xm[None, :])
    conj = 0.5 * (xp[:, None] - xm[None, :])
    num = np.trapezoid(
        np.trapezoid(w * conj**conj_power * amp**power, xm, axis=1), xp
    )
    den = np.trapezoid(np.trapezoid(w, xm, axis=1), xp)
    return float(num / den)


def gaussian_marginal_curve(
    axis: str,
    grid: np.ndarray,
    var_x: float,
    var_y: float,
    signal_intensity: float,
    coupling: float,
    broken: bool,
) -> MarginalCurve:
    """Gaussian-theory prediction for a rotated-axis marginal.

    Along ``x_plus`` the predicted density is a normal law with variance
    ``var_x - 1`` (the vacuum unit removed, since the doubled phase space
    carries only the normally ordered part), centered at zero on the
    symmetric branch or split into an equal mixture at the two broken
    means.  Along ``x_minus`` it is a zero-mean normal law with variance
    ``1 - var_y``.

    Raises
    ------
    DegenerateMarginalError
        If the implied variance is not positive.
    """
    _check_axis(axis)
    grid = np.asarray(grid, dtype=float)
    if axis == "x_plus":
        var = var_x - 1.0
    else:
        var = 1.0 - var_y
    if var <= 0.0:
        raise DegenerateMarginalError(
            f"gaussian {axis} marginal needs positive variance, got {var:g}"
        )
    norm = 1.0 / math.sqrt(2.0 * math.pi * var)
    if axis == "x_plus" and broken:
        mu = 2.0 * math.sqrt(signal_intensity) / coupling
        density = 0.5 * norm * (
            np.exp(-0.5 * (grid - mu) ** 2 / var)
            + np.exp(-0.5 * (grid + mu) ** 2 / var)
        )
    else:
        density = norm * np.exp(-0.5 * grid**2 / var)
    return MarginalCurve(
        axis=axis, grid=grid, density=density, drive=float("nan"), coupling=coupling
    )


@dataclass(frozen=True)
class MarginalComparison:
    l1_distance: float
    variance_ratio: float


def compare_marginals(
    reference: MarginalCurve, candidate: MarginalCurve
) -> MarginalComparison:
    """L1 distance and variance ratio between two curves on one grid.

    Raises
    ------
    GridMismatchError
        If the grids differ anywhere.
    """
    if reference.grid.shape != candidate.grid.shape or not np.array_equal(
        reference.grid, candidate.grid
    ):
        raise GridMismatchError("marginals live on different grids")
    l1 = float(np.trapezoid(np.abs(reference.density - candidate.density), reference.grid))
    return MarginalComparison(
        l1_distance=l1,
        variance_ratio=candidate.variance() / reference.variance(),
    )
