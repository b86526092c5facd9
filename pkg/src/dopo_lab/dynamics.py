"""Relaxation of the coupled mean-field plus moment dynamics.

Integrates the 14-dimensional real system (two complex amplitudes and ten
moment degrees of freedom) from a chosen start until the vector field is
numerically zero, then reports which steady-state branch was reached.  The
main uses are basin-of-attraction checks and validating that the branch
solver's fixed points actually attract.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StiffnessError
from .fluctuations import SecondMoments, signal_quadrature_variances
from .params import Branch, MeanField, NormalizedParams
from .selfconsistent import (
    coupled_vector_field,
    pack_state,
    solve_branches,
    unpack_state,
)

evolution_rhs = coupled_vector_field

# Pump damping beyond which the explicit stepper needs a step ceiling to
# stay accurate on the slow signal manifold.
_STIFF_DECAY_RATIO = 50.0


def vacuum_state(seed_signal: float = 0.0) -> np.ndarray:
    """Empty cavity with an optional small coherent seed on the signal.

    The seed breaks the sign symmetry; without it the dynamics can never
    leave the symmetric manifold.
    """
    state = np.zeros(14)
    state[2] = seed_signal
    return state


@dataclass(frozen=True)
class IntegrationResult:
    """Outcome of a relaxation run."""

    params: NormalizedParams
    times: np.ndarray
    states: np.ndarray
    converged: bool
    stop_reason: str
    final_rhs_norm: float
    nearest_branch: Branch | None
    branch_distance: float

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def final_mean_field(self) -> MeanField:
        return unpack_state(self.final_state)[0]

    def final_moments(self) -> SecondMoments:
        return unpack_state(self.final_state)[1]


def integrate_to_steady_state(
    params: NormalizedParams,
    initial_state: np.ndarray | None = None,
    seed_signal: float = 1e-3,
    t_max: float = 200.0,
    rhs_tol: float = 1e-9,
    n_output: int = 2001,
) -> IntegrationResult:
    """Relax toward a steady state from a given start.

    Parameters
    ----------
    initial_state
        14-vector start; default is vacuum with ``seed_signal`` on the
        signal amplitude.
    t_max
        Time budget in signal lifetimes.
    rhs_tol
        Integration stops early once the sup norm of the vector field
        drops below this.
    n_output
        Number of equally spaced trajectory samples kept.

    Raises
    ------
    StiffnessError
        If the stepper fails or produces non-finite values.
    """
    if initial_state is None:
        initial_state = vacuum_state(seed_signal)
    y0 = np.asarray(initial_state, dtype=float)
    if y0.shape != (14,):
        raise ValueError("initial state must have 14 components")

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        return coupled_vector_field(y, params)

    def settled(_t: float, y: np.ndarray) -> float:
        return float(np.abs(coupled_vector_field(y, params)).max()) - rhs_tol

    settled.terminal = True
    settled.direction = -1

    kwargs = {}
    if params.decay_ratio >= _STIFF_DECAY_RATIO:
        kwargs["max_step"] = 0.1 / params.decay_ratio
    sol = solve_ivp(
        rhs,
        (0.0, t_max),
        y0,
        method="RK45",
        t_eval=np.linspace(0.0, t_max, n_output),
        events=[settled],
        rtol=1e-8,
        atol=1e-10,
        **kwargs,
    )
    if sol.status == -1 or not np.all(np.isfinite(sol.y)):
        raise StiffnessError(f"integration failed: {sol.message}")

    times = sol.t
    states = sol.y.T
    if sol.status == 1 and sol.t_events[0].size:
        # keep the event point as the last sample
        times = np.append(times, sol.t_events[0][-1])
        states = np.vstack([states, sol.y_events[0][-1]])
        stop_reason = "steady"
    else:
        stop_reason = "time-limit"

    final = states[-1]
    final_norm = float(np.abs(coupled_vector_field(final, params)).max())
    branch, dist = _classify(final, params)
    # the event point sits exactly at the tolerance, so allow equality
    # with a whisker of root-finding slack
    converged = stop_reason == "steady" or final_norm < rhs_tol
    return IntegrationResult(
        params=params,
        times=times,
        states=states,
        converged=converged,
        stop_reason=stop_reason,
        final_rhs_norm=final_norm,
        nearest_branch=branch,
        branch_distance=dist,
    )


def _classify(state: np.ndarray, params: NormalizedParams) -> tuple[Branch | None, float]:
    """Nearest steady-state branch and the sup-norm distance to it."""
    best: Branch | None = None
    best_dist = np.inf
    for sol in solve_branches(params):
        target = pack_state(sol.mean_field, sol.moments)
        dist = float(np.abs(state - target).max())
        if dist < best_dist:
            best, best_dist = sol.branch, dist
    return best, best_dist


def trajectory_table(result: IntegrationResult) -> tuple[list[str], np.ndarray]:
    """Tabulate a trajectory: header names and one row per sample.

    Columns: time, the 14 state components, then the two signal quadrature
    variances reconstructed at each sample.
    """
    names = [
        "tau",
        "re_pump", "im_pump", "re_signal", "im_signal",
        "re_pump_pair", "im_pump_pair", "pump_occupation",
        "re_cross_pair", "im_cross_pair",
        "re_cross_conj_pair", "im_cross_conj_pair",
        "re_signal_pair", "im_signal_pair", "signal_occupation",
        "var_x", "var_y",
    ]
    rows = np.empty((len(result.times), 17))
    rows[:, 0] = result.times
    rows[:, 1:15] = result.states
    g = result.params.coupling
    for i, state in enumerate(result.states):
        v = signal_quadrature_variances(
            SecondMoments.from_real_vector(state[4:]), g
        )
        rows[i, 15] = v.var_x
        rows[i, 16] = v.var_y
    return names, rows
