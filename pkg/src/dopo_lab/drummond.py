"""Critical-point perturbation theory near threshold.

In a narrow drive window around 1 the slow amplitude quadrature of the
signal dominates and its stationary statistics follow a quartic
single-variable distribution.  Expectations under that distribution give
closed predictions for the pump depletion and both signal quadrature
variances, valid to first order in the coupling.  They are the benchmark
the self-consistent treatment is measured against at threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import QuadratureError
from .params import NormalizedParams

_SQRT2 = math.sqrt(2.0)
# exp underflow margin for choosing the integration cutoff
_LOG_CUT = 750.0


def _log_weight_peak(a: float) -> tuple[float, float]:
    """Peak location (in x**2) and value of a*x**2 - x**4/16."""
    if a <= 0.0:
        return 0.0, 0.0
    t = 8.0 * a
    return t, a * t - t * t / 16.0


def critical_moment(drive: float, coupling: float, order: int = 2) -> float:
    """Moment of the slow quadrature under the quartic distribution.

    The distribution weight is ``exp(a*x**2 - x**4/16)`` with
    ``a = (drive - 1) / (sqrt(2) * coupling)``.  Odd orders vanish by
    symmetry.

    Raises
    ------
    QuadratureError
        If the adaptive integrator cannot certify nine digits.
    """
    if order < 0:
        raise ValueError("moment order must be nonnegative")
    if order % 2 == 1:
        return 0.0
    a = (drive - 1.0) / (_SQRT2 * coupling)
    t_peak, log_peak = _log_weight_peak(a)
    # cutoff where the weight is down by exp(-750) from its peak
    t_cut = 8.0 * a + 4.0 * math.sqrt(4.0 * a * a - log_peak + _LOG_CUT)
    x_cut = math.sqrt(t_cut)
    points = [math.sqrt(t_peak)] if 0.0 < t_peak < t_cut else None

    def weight(x: float) -> float:
        x2 = x * x
        return math.exp(a * x2 - x2 * x2 / 16.0 - log_peak)

    num, num_err = quad(
        lambda x: x**order * weight(x), 0.0, x_cut,
        points=points, limit=200, epsabs=0.0, epsrel=1e-12,
    )
    den, den_err = quad(
        weight, 0.0, x_cut, points=points, limit=200, epsabs=0.0, epsrel=1e-12
    )
    if den <= 0.0 or num_err > 1e-9 * abs(num) + 1e-300 or den_err > 1e-9 * den:
        raise QuadratureError("quartic-distribution moment did not converge")
    return num / den


@dataclass(frozen=True)
class CriticalPrediction:
    """Threshold-region predictions of the perturbative expansion."""

    pump_mean: float
    var_x: float
    var_y: float
    slow_moment: float
    validity_halfwidth: float
    drive_offset: float

    @property
    def in_validity_window(self) -> bool:
        return abs(self.drive_offset) < self.validity_halfwidth


def perturbative_predictions(params: NormalizedParams) -> CriticalPrediction:
    """Pump mean and signal variances from the quartic distribution.

    The phase quadrature picks up a damping-ratio dependent admixture of
    the slow moment; the amplitude quadrature is the slow moment itself
    scaled up by the inverse coupling.
    """
    g, k = params.coupling, params.decay_ratio
    m2 = critical_moment(params.drive, g, 2)
    return CriticalPrediction(
        pump_mean=params.drive - g / (4.0 * _SQRT2) * m2,
        var_x=_SQRT2 / g * m2,
        var_y=(3.0 - params.drive) / 4.0
        + g / (16.0 * _SQRT2) * (2.0 + 3.0 * k) / (2.0 + k) * m2,
        slow_moment=m2,
        validity_halfwidth=g / _SQRT2,
        drive_offset=params.drive - 1.0,
    )


def threshold_variance_ratios(decay_ratio: float) -> tuple[float, float]:
    """Predicted ratios (perturbative over self-consistent) at threshold.

    First element compares the amplitude variances, second compares the
    squeezing depths ``var_y - 1/2``.  Both are coupling-independent at
    leading order.
    """
    ratio_x = 2.0 / 3.0
    ratio_y = ratio_x * (1.0 + 2.0 * decay_ratio / (2.0 + decay_ratio))
    return ratio_x, ratio_y
