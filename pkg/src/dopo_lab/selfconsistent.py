"""Steady-state branches with fluctuation feedback.

The mean-field equations are augmented by the steady second moments, which
in turn depend on the mean field; a steady state must close the loop.  Two
families exist:

* a symmetric branch at every drive, with zero signal amplitude, fixed by a
  cubic in the pump amplitude;
* past an onset drive slightly above 1, a pair of symmetry-broken branches
  with opposite signal signs.

The broken branch is found by scanning the excess pump amplitude, solving
the signal intensity in closed form at each candidate, and demanding that
the implied drive match the requested one.  Candidate roots are filtered by
physicality and by stability of the full coupled dynamics; exactly one root
per sign survives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CriticalPointSingularityError,
    NoAboveBranchError,
    NoOnsetFoundError,
    RootMultiplicityError,
    SingularDenominatorError,
)
from .fluctuations import (
    QuadratureVariances,
    SecondMoments,
    build_moment_system,
    build_stability_matrix,
    drive_vector,
    physicality_check,
    real_moment_system,
    signal_quadrature_variances,
    solve_steady_moments,
    stability_eigenvalues,
)
from .params import Branch, MeanField, Method, NormalizedParams, classical_steady_states

# Scan grid for the excess pump amplitude on the broken branch. The lower
# edge scales with coupling**2 because the branch can reach down to excess
# amplitudes of order coupling**2/32; the absolute floor keeps the grid
# inside float64 resolution of (1 + s)**2.
_SCAN_POINTS = 10_000
_SCAN_FLOOR = 1e-12
_SCAN_CEIL_MARGIN = 1e-9

# Finite-difference step scale for the coupled Jacobian.
_FD_STEP = 1e-7


@dataclass(frozen=True)
class SteadyStateSolution:
    """One steady state with its fluctuation data attached."""

    method: Method
    branch: Branch
    params: NormalizedParams
    mean_field: MeanField
    moments: SecondMoments
    variances: QuadratureVariances
    eigenvalues: tuple[complex, ...]
    residual: float
    stable: bool

    @property
    def max_real_eigenvalue(self) -> float:
        return max(e.real for e in self.eigenvalues)

    @property
    def signal_photons_normalized(self) -> float:
        """Total signal photon number times the squared coupling."""
        return self.mean_field.signal_intensity + self.moments.signal_occupation

    @property
    def pump_photons_normalized(self) -> float:
        return self.mean_field.pump_intensity + self.moments.pump_occupation


def coupled_vector_field(state: np.ndarray, params: NormalizedParams) -> np.ndarray:
    """Time derivative of the joint mean-field plus second-moment state.

    Layout of ``state`` (14 reals): pump amplitude (re, im), signal
    amplitude (re, im), then the 10 real moment degrees of freedom in the
    order of :meth:`SecondMoments.to_real_vector`.

    The moment feedback enters the mean field twice: the signal pair moment
    depletes the pump alongside the coherent signal intensity, and the
    cross conjugate pair moment drives the signal alongside the coherent
    down-conversion term.
    """
    k, g = params.decay_ratio, params.coupling
    bp = complex(state[0], state[1])
    bs = complex(state[2], state[3])
    r = state[4:]
    signal_pair = complex(r[7], r[8])
    cross_conj = complex(r[5], r[6])
    dbp = k * (params.drive - bp - 0.5 * bs * bs - 0.5 * signal_pair)
    dbs = -bs + bp * np.conj(bs) + cross_conj
    mf = MeanField(pump=bp, signal=bs)
    a, d = real_moment_system(build_moment_system(mf, k), drive_vector(mf, g))
    out = np.empty(14)
    out[0], out[1] = dbp.real, dbp.imag
    out[2], out[3] = dbs.real, dbs.imag
    out[4:] = a @ r + d
    return out


def pack_state(mean_field: MeanField, moments: SecondMoments) -> np.ndarray:
    """Flatten a mean field and its moments into the 14-vector."""
    out = np.empty(14)
    out[0], out[1] = mean_field.pump.real, mean_field.pump.imag
    out[2], out[3] = mean_field.signal.real, mean_field.signal.imag
    out[4:] = moments.to_real_vector()
    return out


def unpack_state(state: np.ndarray) -> tuple[MeanField, SecondMoments]:
    mf = MeanField(
        pump=complex(state[0], state[1]), signal=complex(state[2], state[3])
    )
    return mf, SecondMoments.from_real_vector(state[4:])


def _coupled_jacobian(state: np.ndarray, params: NormalizedParams) -> np.ndarray:
    """Central-difference Jacobian of :func:`coupled_vector_field`."""
    n = state.size
    jac = np.empty((n, n))
    for j in range(n):
        h = _FD_STEP * max(1.0, abs(state[j]))
        up = state.copy()
        dn = state.copy()
        up[j] += h
        dn[j] -= h
        jac[:, j] = (
            coupled_vector_field(up, params) - coupled_vector_field(dn, params)
        ) / (2 * h)
    return jac


def coupled_stability(state: np.ndarray, params: NormalizedParams) -> float:
    """Largest real part in the spectrum of the coupled dynamics."""
    return float(np.linalg.eigvals(_coupled_jacobian(state, params)).real.max())


def symmetric_branch_amplitude(params: NormalizedParams) -> float:
    """Pump amplitude of the symmetric branch.

    Root of a drive-independent-damping cubic; the feedback term shifts the
    linear coefficient by a quarter of the squared coupling, which is what
    keeps the branch regular through threshold.
    """
    sig = params.drive
    c1 = 1.0 + 0.25 * params.coupling**2
    roots = np.roots([1.0, -sig, -c1, sig])
    real = roots[np.abs(roots.imag) < 1e-9].real
    inside = [x for x in real if -1e-12 <= x < 1.0]
    x = min(inside, key=lambda t: abs(t - min(sig, 1.0)))
    # one Newton polish step; np.roots is accurate but not at machine level
    f = ((x - sig) * x - c1) * x + sig
    df = (3.0 * x - 2.0 * sig) * x - c1
    if df != 0.0:
        x -= f / df
    return max(x, 0.0)


def above_signal_intensity(pump_intensity: float, params: NormalizedParams) -> float:
    """Signal intensity on the broken branch at a given pump intensity.

    Closed form from the quadratic the moment feedback imposes between the
    two intensities.

    Raises
    ------
    NoAboveBranchError
        If the pump intensity is outside the open interval where the
        broken branch can live (pump amplitude above 1 and below
        1 + decay ratio).
    """
    r = math.sqrt(pump_intensity)
    return _above_signal_intensity_s(r - 1.0, params)


def _above_signal_intensity_s(s: float, params: NormalizedParams) -> float:
    """Same as :func:`above_signal_intensity` in the excess amplitude s."""
    k, g = params.decay_ratio, params.coupling
    if s <= 0.0 or s >= k:
        raise NoAboveBranchError(
            "broken branch needs pump amplitude in (1, 1 + decay_ratio)"
        )
    ip = (1.0 + s) ** 2
    a = (1.0 + k) ** 2 - ip  # = (k - s) * (2 + k + s) > 0 here
    disc = (4.0 * s * a + k * (1.0 + k) * g * g) ** 2 - k * k * g**4 * a
    u = (k * g * g * ip + math.sqrt(ip * disc)) / (4.0 * s * a)
    return u - 1.0


def pump_drive_residual(
    pump_intensity: float, signal_intensity: float, params: NormalizedParams
) -> float:
    """Requested drive minus the drive implied by the two intensities.

    Zero on a self-consistent steady state.  Evaluating it at the classical
    amplitudes measures how much the feedback shifts the balance.
    """
    k = params.decay_ratio
    g2 = params.coupling**2
    ip, i_s = pump_intensity, signal_intensity
    r = math.sqrt(ip)
    num = ip - (1.0 + k) * (1.0 + i_s) * (1.0 + k + i_s)
    den = ((1.0 + k) ** 2 - ip) * (ip - (1.0 + i_s) ** 2)
    implied = 0.5 * i_s + r * (1.0 + 0.25 * g2 * num / den)
    return params.drive - implied


def _above_residual_grid(s: np.ndarray, params: NormalizedParams) -> np.ndarray:
    """Vectorized drive residual along the excess-amplitude grid."""
    k, g = params.decay_ratio, params.coupling
    ip = (1.0 + s) ** 2
    a = (1.0 + k) ** 2 - ip
    disc = (4.0 * s * a + k * (1.0 + k) * g * g) ** 2 - k * k * g**4 * a
    u = (k * g * g * ip + np.sqrt(ip * disc)) / (4.0 * s * a)
    i_s = u - 1.0
    num = ip - (1.0 + k) * u * (1.0 + k + i_s)
    den = a * (u * u - ip)
    implied = 0.5 * i_s + (1.0 + s) * (1.0 - 0.25 * g * g * num / den)
    return params.drive - implied


def _above_candidate_intensities(params: NormalizedParams) -> list[float]:
    """Excess amplitudes where the drive residual crosses zero."""
    k, g = params.decay_ratio, params.coupling
    lo = max(g * g * 1e-6, _SCAN_FLOOR)
    hi = k * (1.0 - _SCAN_CEIL_MARGIN)
    if hi <= lo:
        return []
    grid = np.geomspace(lo, hi, _SCAN_POINTS)
    res = _above_residual_grid(grid, params)
    ok = np.isfinite(res)
    roots = []
    for i in range(len(grid) - 1):
        if not (ok[i] and ok[i + 1]):
            continue
        if res[i] == 0.0:
            roots.append(grid[i])
        elif res[i] * res[i + 1] < 0.0:
            roots.append(
                brentq(
                    lambda s: _above_residual_grid(np.array([s]), params)[0],
                    grid[i],
                    grid[i + 1],
                    xtol=1e-16,
                    rtol=8.9e-16,
                )
            )
    if ok[-1] and res[-1] == 0.0:
        roots.append(grid[-1])
    return roots


def _build_solution(
    method: Method,
    branch: Branch,
    params: NormalizedParams,
    mean_field: MeanField,
    require_stable_feedback: bool = False,
) -> SteadyStateSolution | None:
    """Assemble a solution record; None if a required filter fails."""
    moments = solve_steady_moments(mean_field, params)
    variances = signal_quadrature_variances(moments, params.coupling)
    eig = stability_eigenvalues(
        build_stability_matrix(mean_field, params.decay_ratio)
    )
    state = pack_state(mean_field, moments)
    residual = float(np.abs(coupled_vector_field(state, params)).max())
    stable = bool(eig.real.max() < 0.0)
    if require_stable_feedback:
        ok, _ = physicality_check(mean_field, moments, variances, eig)
        if not ok:
            return None
        if coupled_stability(state, params) >= 0.0:
            return None
        stable = True
    return SteadyStateSolution(
        method=method,
        branch=branch,
        params=params,
        mean_field=mean_field,
        moments=moments,
        variances=variances,
        eigenvalues=tuple(eig),
        residual=residual,
        stable=stable,
    )


def _mirror_solution(sol: SteadyStateSolution) -> SteadyStateSolution:
    return SteadyStateSolution(
        method=sol.method,
        branch=Branch.ABOVE_MINUS,
        params=sol.params,
        mean_field=sol.mean_field.mirrored(),
        moments=sol.moments.mirrored(),
        variances=sol.variances,
        eigenvalues=sol.eigenvalues,
        residual=sol.residual,
        stable=sol.stable,
    )


def solve_branches(params: NormalizedParams) -> list[SteadyStateSolution]:
    """All stable self-consistent steady states at the given parameters.

    Returns the symmetric branch, then the broken pair when it exists,
    each with moments, variances, stability spectrum and the residual of
    the full coupled equations (a solution quality figure, at rounding
    level by construction).

    Raises
    ------
    RootMultiplicityError
        If more than one broken root per sign survives filtering; the
        model says that never happens, so it is treated as an internal
        inconsistency rather than silently picking one.
    """
    x = symmetric_branch_amplitude(params)
    below = _build_solution(
        Method.SELF_CONSISTENT,
        Branch.BELOW,
        params,
        MeanField(pump=complex(x), signal=0j),
    )
    out = [below]

    survivors = []
    for s in _above_candidate_intensities(params):
        i_s = _above_signal_intensity_s(s, params)
        mf = MeanField(pump=complex(1.0 + s), signal=complex(math.sqrt(i_s)))
        try:
            sol = _build_solution(
                Method.SELF_CONSISTENT, Branch.ABOVE_PLUS, params, mf,
                require_stable_feedback=True,
            )
        except (CriticalPointSingularityError, SingularDenominatorError):
            # a candidate whose covariance cannot even be solved is not a
            # fixed point of the coupled dynamics; drop it like any other
            # filter failure
            continue
        if sol is not None:
            survivors.append(sol)
    if len(survivors) > 1:
        raise RootMultiplicityError(
            f"{len(survivors)} broken roots survived filtering at "
            f"drive={params.drive}"
        )
    if survivors:
        out.append(survivors[0])
        out.append(_mirror_solution(survivors[0]))
    return out


def classical_solve(params: NormalizedParams) -> list[SteadyStateSolution]:
    """Steady states of the unregularized theory, fluctuations bolted on.

    The mean field ignores the moment feedback, then the moments are
    solved at that field.  Kept as the reference the regularized theory is
    compared against; no physicality filtering is applied, so negative
    occupations and unstable branches are reported as-is.

    Raises
    ------
    CriticalPointSingularityError
        At drive 1, where the decoupled fluctuation system is singular.
    """
    out = []
    order = [Branch.BELOW, Branch.ABOVE_PLUS, Branch.ABOVE_MINUS]
    states = classical_steady_states(params)
    for branch in order:
        if branch in states:
            out.append(
                _build_solution(Method.CLASSICAL, branch, params, states[branch])
            )
    return out


def find_branch(
    solutions: list[SteadyStateSolution], branch: Branch
) -> SteadyStateSolution:
    """Pick one branch out of a solution list.

    Raises
    ------
    NoAboveBranchError
        If the requested branch is not present.
    """
    for sol in solutions:
        if sol.branch == branch:
            return sol
    raise NoAboveBranchError(f"no {branch.value} branch at this drive")


def onset_drive(decay_ratio: float, coupling: float, tol: float = 1e-6) -> float:
    """Drive at which the broken branch first exists, by bisection.

    Raises
    ------
    NoOnsetFoundError
        If no broken branch exists anywhere in the supported drive range.
    """
    from .params import MAX_DRIVE

    def has_above(drive: float) -> bool:
        p = NormalizedParams(drive=drive, decay_ratio=decay_ratio, coupling=coupling)
        return len(solve_branches(p)) > 1

    lo, hi = 1.0, MAX_DRIVE
    if not has_above(hi):
        raise NoOnsetFoundError(
            "no broken branch up to the maximum supported drive"
        )
    if has_above(lo):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if has_above(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ThresholdAsymptotics:
    """Leading small-coupling behavior of the symmetric branch at drive 1."""

    var_x: float
    var_y: float
    pump_amplitude: float


def threshold_asymptotics(coupling: float) -> ThresholdAsymptotics:
    """Predicted threshold scalings used to validate the regularization.

    The amplitude quadrature variance saturates at 2*sqrt(2)/coupling
    instead of diverging; the squeezed quadrature stays near 1/2 with a
    linear coupling correction; the pump amplitude stops short of 1 by
    coupling/(2*sqrt(2)).
    """
    g = coupling
    rt8 = 2.0 * math.sqrt(2.0)
    return ThresholdAsymptotics(
        var_x=rt8 / g,
        var_y=0.5 + g / (4.0 * rt8),
        pump_amplitude=1.0 - g / rt8,
    )
