"""Linear fluctuation analysis around a mean field.

Fluctuation operators are ordered ``(pump, pump_conj, signal, signal_conj)``.
Two linear systems matter:

* a 4x4 drift matrix governing single-operator averages, whose spectrum
  decides linear stability;
* a closed 10x10 system for the independent second moments, driven by an
  inhomogeneous term proportional to the squared coupling.  Its steady
  solution feeds back into the mean-field equations and fixes the
  quadrature variances.

The second-moment basis, in order::

    pump_pair         <d_p d_p>
    pump_pair_conj    <d_p+ d_p+>
    pump_occupation   <d_p+ d_p>
    cross_pair        <d_p d_s>
    cross_pair_conj   <d_p+ d_s+>
    cross_conj_pair   <d_p d_s+>
    cross_conj_conj   <d_p+ d_s>
    signal_pair       <d_s d_s>
    signal_pair_conj  <d_s+ d_s+>
    signal_occupation <d_s+ d_s>

where ``d_j`` is the fluctuation of mode ``j``.  All ten are zero in vacuum:
occupations are normally ordered and carry no zero-point half.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CriticalPointSingularityError,
    SingularDenominatorError,
)
from .params import MeanField, NormalizedParams

# Relative determinant floor for the 10x10 solve.
_DET_GUARD = 1e-12


def build_stability_matrix(mean_field: MeanField, decay_ratio: float) -> np.ndarray:
    """Drift matrix of the linearized single-operator dynamics.

    Parameters
    ----------
    mean_field
        Amplitudes the fluctuations ride on.
    decay_ratio
        Pump damping over signal damping.

    Returns
    -------
    numpy.ndarray
        Complex 4x4 matrix in the operator order documented above.
    """
    k = decay_ratio
    p, s = mean_field.pump, mean_field.signal
    return np.array(
        [
            [-k, 0.0, -k * s, 0.0],
            [0.0, -k, 0.0, -k * np.conj(s)],
            [np.conj(s), 0.0, -1.0, p],
            [0.0, s, np.conj(p), -1.0],
        ],
        dtype=complex,
    )


def stability_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a drift matrix, sorted by descending real part."""
    eig = np.linalg.eigvals(matrix)
    order = np.argsort(-eig.real, kind="stable")
    return eig[order]


def build_moment_system(mean_field: MeanField, decay_ratio: float) -> np.ndarray:
    """Coefficient matrix of the closed second-moment dynamics.

    Built row by row from the two-mode quantum Langevin equations; rows for
    conjugated moments are the elementwise conjugates of their partners with
    the basis columns swapped accordingly.
    """
    k = decay_ratio
    p, s = mean_field.pump, mean_field.signal
    pc, sc = np.conj(p), np.conj(s)
    m = np.zeros((10, 10), dtype=complex)
    # pump_pair and conjugate
    m[0, 0] = -2 * k
    m[0, 3] = -2 * k * s
    m[1, 1] = -2 * k
    m[1, 4] = -2 * k * sc
    # pump_occupation
    m[2, 2] = -2 * k
    m[2, 5] = -k * sc
    m[2, 6] = -k * s
    # cross_pair and conjugate
    m[3, 0] = sc
    m[3, 3] = -(1 + k)
    m[3, 5] = p
    m[3, 7] = -k * s
    m[4, 1] = s
    m[4, 4] = -(1 + k)
    m[4, 6] = pc
    m[4, 8] = -k * sc
    # cross_conj_pair and conjugate; the signal drift conjugates the pump
    # amplitude here, unlike in cross_pair
    m[5, 2] = s
    m[5, 3] = pc
    m[5, 5] = -(1 + k)
    m[5, 9] = -k * s
    m[6, 2] = sc
    m[6, 4] = p
    m[6, 6] = -(1 + k)
    m[6, 9] = -k * sc
    # signal_pair and conjugate
    m[7, 3] = 2 * sc
    m[7, 7] = -2.0
    m[7, 9] = 2 * p
    m[8, 4] = 2 * s
    m[8, 8] = -2.0
    m[8, 9] = 2 * pc
    # signal_occupation
    m[9, 5] = sc
    m[9, 6] = s
    m[9, 7] = pc
    m[9, 8] = p
    m[9, 9] = -2.0
    return m


def drive_vector(mean_field: MeanField, coupling: float) -> np.ndarray:
    """Inhomogeneous term of the second-moment dynamics.

    Only the signal pair moments are sourced; the strength is the squared
    coupling times the pump amplitude, the scaled footprint of the
    down-conversion vacuum noise.
    """
    n = np.zeros(10, dtype=complex)
    n[7] = coupling**2 * mean_field.pump
    n[8] = coupling**2 * np.conj(mean_field.pump)
    return n


@dataclass(frozen=True)
class SecondMoments:
    """The six independent second moments of the fluctuations."""

    pump_pair: complex
    pump_occupation: float
    cross_pair: complex
    cross_conj_pair: complex
    signal_pair: complex
    signal_occupation: float

    def to_real_vector(self) -> np.ndarray:
        """Pack into the 10 real degrees of freedom."""
        return np.array(
            [
                self.pump_pair.real,
                self.pump_pair.imag,
                self.pump_occupation,
                self.cross_pair.real,
                self.cross_pair.imag,
                self.cross_conj_pair.real,
                self.cross_conj_pair.imag,
                self.signal_pair.real,
                self.signal_pair.imag,
                self.signal_occupation,
            ]
        )

    @classmethod
    def from_real_vector(cls, r: np.ndarray) -> "SecondMoments":
        return cls(
            pump_pair=complex(r[0], r[1]),
            pump_occupation=float(r[2]),
            cross_pair=complex(r[3], r[4]),
            cross_conj_pair=complex(r[5], r[6]),
            signal_pair=complex(r[7], r[8]),
            signal_occupation=float(r[9]),
        )

    def to_complex_vector(self) -> np.ndarray:
        """Expand to the full 10-component complex basis."""
        return np.array(
            [
                self.pump_pair,
                np.conj(self.pump_pair),
                self.pump_occupation,
                self.cross_pair,
                np.conj(self.cross_pair),
                self.cross_conj_pair,
                np.conj(self.cross_conj_pair),
                self.signal_pair,
                np.conj(self.signal_pair),
                self.signal_occupation,
            ],
            dtype=complex,
        )

    def mirrored(self) -> "SecondMoments":
        """Image under the sign flip of the signal mode.

        Pair moments carrying one signal operator change sign, everything
        else is invariant.
        """
        return SecondMoments(
            pump_pair=self.pump_pair,
            pump_occupation=self.pump_occupation,
            cross_pair=-self.cross_pair,
            cross_conj_pair=-self.cross_conj_pair,
            signal_pair=self.signal_pair,
            signal_occupation=self.signal_occupation,
        )


# Complex expansion matrix: maps the 10 real degrees of freedom onto the
# complex moment basis. Conjugate pairs share a real/imag slot pair.
_EXPAND = np.zeros((10, 10), dtype=complex)
for _row, _re, _im in [(0, 0, 1), (3, 3, 4), (5, 5, 6), (7, 7, 8)]:
    _EXPAND[_row, _re] = 1.0
    _EXPAND[_row, _im] = 1j
    _EXPAND[_row + 1, _re] = 1.0
    _EXPAND[_row + 1, _im] = -1j
_EXPAND[2, 2] = 1.0
_EXPAND[9, 9] = 1.0

# Rows of the complex system that project onto each real degree of freedom,
# and whether the real or imaginary part is taken.
_PROJECT = [(0, 0), (0, 1), (2, 0), (3, 0), (3, 1), (5, 0), (5, 1), (7, 0), (7, 1), (9, 0)]


def real_moment_system(
    matrix: np.ndarray, drive: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Rewrite the complex 10x10 system over the 10 real degrees of freedom.

    Exact, not an approximation: the complex system is closed under
    conjugation, so its action on conjugation-consistent vectors is fully
    captured by a real matrix.
    """
    mt = matrix @ _EXPAND
    a = np.empty((10, 10))
    d = np.empty(10)
    for i, (row, part) in enumerate(_PROJECT):
        a[i] = mt[row].real if part == 0 else mt[row].imag
        d[i] = drive[row].real if part == 0 else drive[row].imag
    return a, d


def solve_steady_moments(
    mean_field: MeanField, params: NormalizedParams
) -> SecondMoments:
    """Steady second moments at a fixed mean field.

    Raises
    ------
    CriticalPointSingularityError
        If the moment system is singular, as happens for the classical
        amplitudes exactly at threshold where the fluctuations diverge.
    """
    m = build_moment_system(mean_field, params.decay_ratio)
    n = drive_vector(mean_field, params.coupling)
    # relative determinant via the Hadamard bound; a plain norm power
    # misjudges the natural scale once the dampings are very asymmetric
    hadamard = np.prod(np.linalg.norm(m, axis=0))
    det = np.linalg.det(m)
    if abs(det) < _DET_GUARD * hadamard:
        raise CriticalPointSingularityError(
            "moment system is singular at this mean field"
        )
    a, d = real_moment_system(m, n)
    r = np.linalg.solve(a, -d)
    return SecondMoments.from_real_vector(r)


def closed_form_pair_moments(
    mean_field: MeanField, params: NormalizedParams
) -> tuple[complex, complex]:
    """Signal pair moment and cross conjugate pair moment in closed form.

    Valid for real mean-field amplitudes, which covers every accepted
    branch.  Serves as an independent cross-check of the 10x10 solve.

    Returns
    -------
    tuple
        ``(signal_pair, cross_conj_pair)``.
    """
    k = params.decay_ratio
    g2 = params.coupling**2
    p = mean_field.pump.real
    s = mean_field.signal.real
    ip = p * p
    i_s = s * s
    den = (ip - (1 + k) ** 2) * (ip - (1 + i_s) ** 2)
    scale = max(1.0, ip, (1 + k) ** 2, (1 + i_s) ** 2)
    if abs(den) < 1e-14 * scale**2:
        raise SingularDenominatorError(
            "pair-moment denominator vanishes at this mean field"
        )
    signal_pair = -g2 * p * (ip - (1 + k) * (1 + i_s) * (1 + k + i_s)) / (2 * den)
    cross_conj = -g2 * k * s * ip * (2 + k + i_s) / (2 * den)
    return complex(signal_pair), complex(cross_conj)


@dataclass(frozen=True)
class QuadratureVariances:
    """Variances of the two signal quadratures; vacuum level is 1."""

    var_x: float
    var_y: float

    @property
    def uncertainty_product(self) -> float:
        return self.var_x * self.var_y


def signal_quadrature_variances(
    moments: SecondMoments, coupling: float
) -> QuadratureVariances:
    """Quadrature variances of the signal mode from its second moments.

    The amplitude quadrature adds the pair moment, the phase quadrature
    subtracts it; the occupation enters both with the same sign.
    """
    g2 = coupling**2
    pair = moments.signal_pair.real
    occ = moments.signal_occupation
    return QuadratureVariances(
        var_x=1.0 + 2.0 * (pair + occ) / g2,
        var_y=1.0 - 2.0 * (pair - occ) / g2,
    )


def pump_quadrature_variances(
    moments: SecondMoments, decay_ratio: float, coupling: float
) -> QuadratureVariances:
    """Same as :func:`signal_quadrature_variances` for the pump mode."""
    kg2 = decay_ratio * coupling**2
    pair = moments.pump_pair.real
    occ = moments.pump_occupation
    return QuadratureVariances(
        var_x=1.0 + 2.0 * (pair + occ) / kg2,
        var_y=1.0 - 2.0 * (pair - occ) / kg2,
    )


def branch_variances_from_intensities(
    pump_intensity: float, signal_intensity: float, decay_ratio: float
) -> QuadratureVariances:
    """Signal quadrature variances in closed form from the intensities.

    Independent route to the same numbers as the moment reconstruction;
    valid on branches with real amplitudes.
    """
    k = decay_ratio
    r = np.sqrt(pump_intensity)
    u = 1.0 + signal_intensity
    den_x = (u - r) * (1 + k - r)
    den_y = (u + r) * (1 + k + r)
    if abs(den_x) < 1e-14 * max(1.0, u, 1 + k) ** 2:
        raise SingularDenominatorError("amplitude-quadrature denominator vanishes")
    return QuadratureVariances(
        var_x=((1 + k) * u - r) / den_x,
        var_y=((1 + k) * u + r) / den_y,
    )


def physicality_check(
    mean_field: MeanField,
    moments: SecondMoments,
    variances: QuadratureVariances,
    eigenvalues: np.ndarray,
    atol: float = 1e-9,
) -> tuple[bool, list[str]]:
    """Filter unphysical steady-state candidates.

    Checks, in order: nonnegative occupations, nonnegative total photon
    numbers in both modes, the uncertainty product at or above 1, and
    linear stability.

    Returns
    -------
    tuple
        ``(ok, reasons)`` where ``reasons`` lists every failed check.
    """
    reasons = []
    if moments.signal_occupation < -atol:
        reasons.append("negative signal occupation")
    if moments.pump_occupation < -atol:
        reasons.append("negative pump occupation")
    if mean_field.signal_intensity + moments.signal_occupation < -atol:
        reasons.append("negative signal photon number")
    if mean_field.pump_intensity + moments.pump_occupation < -atol:
        reasons.append("negative pump photon number")
    if variances.uncertainty_product < 1.0 - 1e-9:
        reasons.append("uncertainty product below 1")
    if eigenvalues.real.max() >= 0.0:
        reasons.append("linearly unstable")
    return (not reasons, reasons)
