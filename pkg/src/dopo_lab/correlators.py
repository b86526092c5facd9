"""Two-time correlators and quadrature noise spectra.

Stationary fluctuations decay according to the same drift matrix that
decides stability, so every two-time correlator is the equal-time
covariance propagated forward.  Fourier transforming the quadrature
autocorrelations gives the noise spectra; integrating a spectrum back over
frequency must recover the corresponding variance, which is the module's
built-in consistency check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import expm

from .fluctuations import build_stability_matrix
from .selfconsistent import SteadyStateSolution

# Propagation horizon in units of the slowest decay time, and bounds on
# the number of time samples.
_HORIZON_LIFETIMES = 40.0
_MIN_TIME_SAMPLES = 4001
_MAX_TIME_SAMPLES = 200_001
# cap on complex phase-matrix entries held at once (~64 MB)
_CHUNK_BUDGET = 4_000_000


def stationary_covariance(solution: SteadyStateSolution) -> np.ndarray:
    """Equal-time covariance of the fluctuation vector.

    Ordered ``(pump, pump_conj, signal, signal_conj)``; entries are the
    steady second moments arranged so the matrix vanishes in vacuum.
    """
    m = solution.moments
    cpp = m.pump_pair
    npp = m.pump_occupation
    cps = m.cross_pair
    xps = m.cross_conj_pair
    css = m.signal_pair
    nss = m.signal_occupation
    return np.array(
        [
            [cpp, npp, cps, xps],
            [npp, np.conj(cpp), np.conj(xps), np.conj(cps)],
            [cps, np.conj(xps), css, nss],
            [xps, np.conj(cps), nss, np.conj(css)],
        ],
        dtype=complex,
    )


def commutator_matrix(solution: SteadyStateSolution) -> np.ndarray:
    """Commutator corrections distinguishing operator order from moments.

    Added to the covariance before propagation so spectra integrate back
    to the full quadrature variances including the vacuum unit.
    """
    p = solution.params
    k = np.zeros((4, 4), dtype=complex)
    k[0, 1] = p.decay_ratio * p.coupling**2
    k[2, 3] = p.coupling**2
    return k


def two_time_correlator(solution: SteadyStateSolution, tau: float) -> np.ndarray:
    """Matrix of lagged moments at a nonnegative lag."""
    if tau < 0.0:
        raise ValueError("lag must be nonnegative")
    drift = build_stability_matrix(solution.mean_field, solution.params.decay_ratio)
    return expm(drift * tau) @ stationary_covariance(solution)


def _decay_rate(solution: SteadyStateSolution) -> float:
    rate = -solution.max_real_eigenvalue
    if rate <= 0.0:
        raise ValueError("spectra need a strictly stable solution")
    return rate


def quadrature_correlations(
    solution: SteadyStateSolution, taus: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Autocorrelations of both signal quadratures on a uniform lag grid.

    Includes the commutator part, so the zero-lag values are the full
    variances.  The covariance is advanced one uniform step at a time by a
    single matrix exponential.
    """
    taus = np.asarray(taus, dtype=float)
    steps = np.diff(taus)
    if taus.size < 2 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("lag grid must be uniform with at least two points")
    drift = build_stability_matrix(solution.mean_field, solution.params.decay_ratio)
    propagator = expm(drift * steps[0])
    start = expm(drift * taus[0]) @ (
        stationary_covariance(solution) + commutator_matrix(solution)
    )
    g2 = solution.params.coupling**2
    vx = np.array([0.0, 0.0, 1.0, 1.0])
    vy = np.array([0.0, 0.0, -1.0, 1.0])
    cx = np.empty(taus.size)
    cy = np.empty(taus.size)
    current = start
    for i in range(taus.size):
        cx[i] = (vx @ current @ vx).real / g2
        cy[i] = -(vy @ current @ vy).real / g2
        if i + 1 < taus.size:
            current = propagator @ current
    return cx, cy


@dataclass(frozen=True)
class SpectrumCurve:
    """Noise spectra of both signal quadratures on a frequency grid."""

    omega: np.ndarray
    spectrum_x: np.ndarray
    spectrum_y: np.ndarray

    def integrated_variances(self) -> tuple[float, float]:
        """Frequency integrals over 2*pi; equal the variances when the
        grid covers the spectrum."""
        vx = float(simpson(self.spectrum_x, x=self.omega)) / (2.0 * math.pi)
        vy = float(simpson(self.spectrum_y, x=self.omega)) / (2.0 * math.pi)
        return vx, vy


def default_frequency_grid(
    solution: SteadyStateSolution, span: float = 40.0, n: int = 4001
) -> np.ndarray:
    """Symmetric frequency grid scaled to the slowest decay rate."""
    rate = _decay_rate(solution)
    return np.linspace(-span * rate, span * rate, n)


def quadrature_spectrum(
    solution: SteadyStateSolution, omega: np.ndarray | None = None
) -> SpectrumCurve:
    """One-sided-transform noise spectra of the signal quadratures.

    The lag horizon is many slowest-decay lifetimes and the lag step
    resolves the largest requested frequency, so the composite-rule
    transform is accurate wherever the grid has support.
    """
    if omega is None:
        omega = default_frequency_grid(solution)
    omega = np.asarray(omega, dtype=float)
    rate = _decay_rate(solution)
    horizon = _HORIZON_LIFETIMES / rate
    w_top = float(np.abs(omega).max())
    n_tau = max(_MIN_TIME_SAMPLES, int(horizon * w_top * 8.0 / math.pi) + 1)
    n_tau = min(n_tau, _MAX_TIME_SAMPLES)
    if n_tau % 2 == 0:
        n_tau += 1
    taus = np.linspace(0.0, horizon, n_tau)
    cx, cy = quadrature_correlations(solution, taus)

    # composite Simpson weights on the uniform lag grid
    h = taus[1] - taus[0]
    weights = np.ones(n_tau)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    weights *= h / 3.0
    wx = weights * cx
    wy = weights * cy

    sx = np.empty(omega.size)
    sy = np.empty(omega.size)
    chunk = max(1, _CHUNK_BUDGET // n_tau)
    for lo in range(0, omega.size, chunk):
        hi = min(lo + chunk, omega.size)
        phase = np.exp(1j * omega[lo:hi, None] * taus[None, :])
        sx[lo:hi] = 2.0 * (phase @ wx).real
        sy[lo:hi] = 2.0 * (phase @ wy).real
    return SpectrumCurve(omega=omega, spectrum_x=sx, spectrum_y=sy)


def lorentzian_halfwidth(curve: SpectrumCurve, which: str = "x") -> float:
    """Half width at half maximum of a spectrum by linear interpolation."""
    s = curve.spectrum_x if which == "x" else curve.spectrum_y
    peak = s.max()
    half = 0.5 * peak
    above = s >= half
    idx = np.flatnonzero(above)
    if idx.size < 2:
        raise ValueError("spectrum grid too coarse to locate the half maximum")
    # right edge: interpolate between the last point above and its neighbor
    right = idx[-1]
    if right + 1 >= s.size:
        raise ValueError("spectrum not resolved: half maximum beyond the grid")
    w = curve.omega
    frac = (s[right] - half) / (s[right] - s[right + 1])
    omega_half = w[right] + frac * (w[right + 1] - w[right])
    peak_omega = w[np.argmax(s)]
    return float(omega_half - peak_omega)
