"""Parameter handling and classical (decoupled) steady states.

The model is a two-mode cavity: a pump mode driven by an external field and
damped at rate ``gamma_p``, down-converting into a signal mode damped at rate
``gamma_s``.  All physics modules work in scaled units where the signal
lifetime is 1 and amplitudes are dimensionless.  Three numbers survive the
scaling:

* ``drive``        - injected field in units of its threshold value
* ``decay_ratio``  - pump damping over signal damping
* ``coupling``     - nonlinearity over the geometric mean of the dampings

Intensities in these units convert back to photon numbers through
``coupling**2`` (signal) and ``decay_ratio * coupling**2`` (pump).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidParameterError

# Supported drive range. Far beyond this the scaled equations are fine but
# none of the validation data covers it, so refuse loudly instead.
MAX_DRIVE = 5.0


class Method(str, enum.Enum):
    """Which level of theory computes the steady state."""

    CLASSICAL = "classical"
    SELF_CONSISTENT = "self-consistent"
    DRUMMOND = "drummond"


class Branch(str, enum.Enum):
    """Steady-state family: symmetric, or broken with either sign."""

    BELOW = "below"
    ABOVE_PLUS = "above_plus"
    ABOVE_MINUS = "above_minus"


@dataclass(frozen=True)
class PhysicalParams:
    """Raw cavity constants, all in the same frequency unit."""

    injection_amplitude: float
    nonlinear_coupling: float
    pump_decay_rate: float
    signal_decay_rate: float

    def normalize(self) -> "NormalizedParams":
        """Reduce the four raw constants to the three scaled ones."""
        if self.pump_decay_rate <= 0 or self.signal_decay_rate <= 0:
            raise InvalidParameterError("decay rates must be positive")
        if self.nonlinear_coupling <= 0:
            raise InvalidParameterError("nonlinear coupling must be positive")
        if self.injection_amplitude < 0:
            raise InvalidParameterError("injection amplitude must be nonnegative")
        gp, gs = self.pump_decay_rate, self.signal_decay_rate
        return NormalizedParams(
            drive=self.injection_amplitude * self.nonlinear_coupling / (gp * gs),
            decay_ratio=gp / gs,
            coupling=self.nonlinear_coupling / math.sqrt(gp * gs),
        )


@dataclass(frozen=True)
class NormalizedParams:
    """Scaled model parameters; the only inputs the solvers ever see."""

    drive: float
    decay_ratio: float = 1.0
    coupling: float = 0.01

    def __post_init__(self) -> None:
        if not (0.0 <= self.drive <= MAX_DRIVE):
            raise InvalidParameterError(
                f"drive must lie in [0, {MAX_DRIVE}], got {self.drive}"
            )
        if self.decay_ratio <= 0:
            raise InvalidParameterError("decay ratio must be positive")
        if not (0.0 < self.coupling < 1.0):
            raise InvalidParameterError("coupling must lie in (0, 1)")

    def signal_photons(self, signal_intensity: float) -> float:
        """Convert a scaled signal intensity to a photon number."""
        return signal_intensity / self.coupling**2

    def pump_photons(self, pump_intensity: float) -> float:
        """Convert a scaled pump intensity to a photon number."""
        return pump_intensity / (self.decay_ratio * self.coupling**2)


@dataclass(frozen=True)
class MeanField:
    """Coherent amplitudes of both modes, in scaled units."""

    pump: complex
    signal: complex

    @property
    def pump_intensity(self) -> float:
        return abs(self.pump) ** 2

    @property
    def signal_intensity(self) -> float:
        return abs(self.signal) ** 2

    def mirrored(self) -> "MeanField":
        """Image under the sign flip of the signal mode."""
        return MeanField(pump=self.pump, signal=-self.signal)


def classical_steady_states(params: NormalizedParams) -> dict[Branch, MeanField]:
    """Steady states of the decoupled (noise-free) amplitude equations.

    The symmetric state exists at every drive.  Past the threshold drive 1
    the pump clamps at unit intensity and a broken pair appears whose signal
    intensity grows linearly, 2 * (drive - 1).

    Returns
    -------
    dict
        Maps each existing :class:`Branch` to its :class:`MeanField`.
    """
    out = {Branch.BELOW: MeanField(pump=complex(params.drive), signal=0j)}
    if params.drive > 1.0:
        amp = math.sqrt(2.0 * (params.drive - 1.0))
        out[Branch.ABOVE_PLUS] = MeanField(pump=1 + 0j, signal=complex(amp))
        out[Branch.ABOVE_MINUS] = MeanField(pump=1 + 0j, signal=complex(-amp))
    return out
