"""End-to-end acceptance checks, one test per shipped guarantee.

Each test prints a single PASS/FAIL line so the suite output doubles as an
acceptance report.  Tolerances are part of the contract; do not loosen them
to make a failing build green.
"""
import math
import time

import numpy as np
import pytest

from dopo_lab import (
    Branch,
    CriticalPointSingularityError,
    NormalizedParams,
    classical_solve,
    closed_form_pair_moments,
    compare_marginals,
    critical_moment,
    find_branch,
    gaussian_marginal_curve,
    integrate_to_steady_state,
    lorentzian_halfwidth,
    marginal_curve,
    normal_ordered_moment,
    onset_drive,
    perturbative_predictions,
    quadrature_spectrum,
    solve_branches,
    stationary_covariance,
)

_GRID_KAPPA = (0.1, 1.0, 10.0)
_GRID_COUPLING = (0.001, 0.01, 0.1)
_GRID_DRIVE = np.linspace(0.0, 3.0, 20)


def _verdict(num: int, label: str, failures: list[str]) -> None:
    status = "FAIL" if failures else "PASS"
    print(f"acceptance criterion {num:02d} [{status}] {label}")
    assert not failures, f"criterion {num:02d} ({label}): " + "; ".join(failures)


def _check(failures: list[str], ok: bool, message: str) -> None:
    if not ok:
        failures.append(message)


@pytest.fixture(scope="module")
def grid_solutions():
    """All accepted steady states over the 3 x 3 x 20 parameter grid."""
    out = []
    for kappa in _GRID_KAPPA:
        for g in _GRID_COUPLING:
            for sigma in _GRID_DRIVE:
                params = NormalizedParams(
                    drive=float(sigma), decay_ratio=kappa, coupling=g
                )
                out.extend(solve_branches(params))
    return out


def test_criterion_01_vacuum_limit():
    failures = []
    params = NormalizedParams(drive=0.0, decay_ratio=1.0, coupling=0.01)
    sol = find_branch(solve_branches(params), Branch.BELOW)
    _check(failures, np.abs(sol.moments.to_real_vector()).max() <= 1e-12,
           "undriven moments not all zero")
    _check(failures, abs(sol.variances.var_x - 1.0) <= 1e-12, "var_x != 1")
    _check(failures, abs(sol.variances.var_y - 1.0) <= 1e-12, "var_y != 1")
    _verdict(1, "vacuum limit", failures)


def test_criterion_02_classical_divergence():
    failures = []
    deviations = []
    for drive, expect in ((0.9, 10.0), (0.99, 100.0)):
        params = NormalizedParams(drive=drive, decay_ratio=1.0, coupling=0.01)
        sol = find_branch(classical_solve(params), Branch.BELOW)
        _check(failures, abs(sol.variances.var_x / expect - 1.0) <= 1e-9,
               f"classical var_x at drive {drive} missed {expect}")
        deviations.append(abs(sol.variances.var_y - 0.5))
    params = NormalizedParams(drive=0.999, decay_ratio=1.0, coupling=0.01)
    sol = find_branch(classical_solve(params), Branch.BELOW)
    deviations.append(abs(sol.variances.var_y - 0.5))
    _check(failures, deviations[2] < deviations[1] < deviations[0],
           "var_y does not approach 0.5 from above")
    _check(failures, deviations[2] <= 1e-3, "var_y still far from 0.5 at 0.999")
    try:
        classical_solve(NormalizedParams(drive=1.0, decay_ratio=1.0, coupling=0.01))
        failures.append("classical threshold did not raise")
    except CriticalPointSingularityError as exc:
        _check(failures, exc.code == "critical-point-singularity",
               f"unexpected error code {exc.code}")
    _verdict(2, "classical divergence and threshold singularity", failures)


def test_criterion_03_regularized_threshold_values():
    failures = []
    for g in (0.005, 0.01, 0.02):
        params = NormalizedParams(drive=1.0, decay_ratio=1.0, coupling=g)
        sol = find_branch(solve_branches(params), Branch.BELOW)
        var_x_leading = 2.0 * math.sqrt(2.0) / g
        var_y_excess_leading = g / (8.0 * math.sqrt(2.0))
        _check(failures,
               abs(sol.variances.var_x / var_x_leading - 1.0) <= 0.10,
               f"var_x off leading order at g={g}")
        _check(failures,
               abs((sol.variances.var_y - 0.5) / var_y_excess_leading - 1.0) <= 0.10,
               f"var_y excess off leading order at g={g}")
    _verdict(3, "regularized threshold variances", failures)


def test_criterion_04_closed_form_oracle_equivalence(grid_solutions):
    failures = []
    worst = 0.0
    for sol in grid_solutions:
        pair, cross = closed_form_pair_moments(sol.mean_field, sol.params)
        for closed, solved in (
            (pair, sol.moments.signal_pair),
            (cross, sol.moments.cross_conj_pair),
        ):
            scale = max(abs(closed), abs(solved))
            if scale > 0.0:
                worst = max(worst, abs(closed - solved) / scale)
    _check(failures, worst <= 1e-10,
           f"closed form and linear solve disagree by {worst:.3e}")
    _verdict(4, "closed-form pair moments match the linear solve", failures)


def test_criterion_05_dynamics_convergence():
    failures = []
    params = NormalizedParams(drive=0.5, decay_ratio=1.0, coupling=0.01)
    result = integrate_to_steady_state(params, seed_signal=0.0, t_max=200.0)
    _check(failures, result.converged, "vacuum run did not converge")
    _check(failures, result.nearest_branch == Branch.BELOW,
           "vacuum run missed the symmetric branch")
    _check(failures, result.branch_distance <= 1e-6,
           f"vacuum run distance {result.branch_distance:.2e}")
    params = NormalizedParams(drive=1.5, decay_ratio=1.0, coupling=0.01)
    result = integrate_to_steady_state(params, seed_signal=0.1, t_max=200.0)
    _check(failures, result.converged, "seeded run did not converge")
    _check(failures, result.nearest_branch == Branch.ABOVE_PLUS,
           "seeded run missed the broken branch")
    _check(failures, result.branch_distance <= 1e-6,
           f"seeded run distance {result.branch_distance:.2e}")
    _verdict(5, "relaxation reaches the solved fixed points", failures)


def test_criterion_06_critical_quadrature_moment():
    failures = []
    expected = 4.0 * math.gamma(0.75) / math.gamma(0.25)
    value = critical_moment(1.0, 0.01, order=2)
    _check(failures, abs(value - expected) <= 1e-6,
           f"critical second moment {value!r} != {expected!r}")
    _verdict(6, "critical-point quadrature moment", failures)


def test_criterion_07_threshold_variance_ratios():
    failures = []
    cases = (
        (1.0, 10.0 / 9.0),
        (10.0, (2.0 / 3.0) * (1.0 + 2.0 * 10.0 / (2.0 + 10.0))),
    )
    for kappa, y_formula in cases:
        params = NormalizedParams(drive=1.0, decay_ratio=kappa, coupling=0.01)
        sc = find_branch(solve_branches(params), Branch.BELOW)
        pert = perturbative_predictions(params)
        x_ratio = pert.var_x / sc.variances.var_x
        y_ratio = (pert.var_y - 0.5) / (sc.variances.var_y - 0.5)
        _check(failures, abs(x_ratio / (2.0 / 3.0) - 1.0) <= 0.05,
               f"x-variance ratio {x_ratio:.4f} at kappa={kappa}")
        _check(failures, abs(y_ratio / y_formula - 1.0) <= 0.05,
               f"y-excess ratio {y_ratio:.4f} at kappa={kappa}")
    _verdict(7, "perturbative over self-consistent variance ratios", failures)


def test_criterion_08_exact_distribution():
    failures = []
    start = time.perf_counter()
    g = 0.01
    params = NormalizedParams(drive=1.0 + g, decay_ratio=1000.0, coupling=g)
    curve = marginal_curve(params, axis="x_minus")
    _check(failures, abs(curve.integral() - 1.0) <= 1e-6, "normalization off")
    amp = normal_ordered_moment(params, 0, 1)
    _check(failures, abs(amp) <= 1e-8, f"mean amplitude {amp!r} not zero")
    below = find_branch(solve_branches(params), Branch.BELOW)
    target = 1.0 - below.variances.var_y
    _check(failures, abs(curve.variance() / target - 1.0) <= 0.05,
           f"squeezed variance {curve.variance():.5f} vs {target:.5f}")
    elapsed = time.perf_counter() - start
    _check(failures, elapsed <= 120.0, f"quadratures took {elapsed:.1f}s")
    _verdict(8, "exact stationary distribution checks", failures)


def test_criterion_09_branch_onset():
    failures = []
    onset = onset_drive(1000.0, 0.01)
    _check(failures, 1.008 <= onset <= 1.012, f"onset {onset!r} out of range")
    _verdict(9, "symmetry-broken branch onset", failures)


def test_criterion_10_physicality(grid_solutions):
    failures = []
    for sol in grid_solutions:
        tag = (f"kappa={sol.params.decay_ratio} g={sol.params.coupling} "
               f"sigma={sol.params.drive:.4f} {sol.branch.value}")
        if sol.variances.uncertainty_product < 1.0 - 1e-12:
            failures.append(f"uncertainty product below one: {tag}")
        if (sol.moments.signal_occupation < -1e-12
                or sol.moments.pump_occupation < -1e-12):
            failures.append(f"negative occupation: {tag}")
        if not sol.max_real_eigenvalue < 0.0:
            failures.append(f"not strictly stable: {tag}")
        if (abs(sol.mean_field.signal_intensity) < 1e-9
                and abs(sol.mean_field.pump_intensity - 1.0) < 1e-9):
            failures.append(f"pinned spurious state accepted: {tag}")
    _verdict(10, "physicality of every accepted solution", failures)


def test_criterion_11_regression_consistency():
    failures = []
    params = NormalizedParams(drive=0.5, decay_ratio=1.0, coupling=0.01)
    sol = find_branch(solve_branches(params), Branch.BELOW)
    cov = stationary_covariance(sol)
    m = sol.moments
    exact_pairs = (
        (cov[2, 2], m.signal_pair), (cov[2, 3], m.signal_occupation),
        (cov[0, 0], m.pump_pair), (cov[0, 1], m.pump_occupation),
        (cov[0, 2], m.cross_pair), (cov[0, 3], m.cross_conj_pair),
    )
    _check(failures, all(a == b for a, b in exact_pairs),
           "zero-lag covariance is not the steady moments")
    rate = -sol.max_real_eigenvalue
    curve = quadrature_spectrum(sol, np.linspace(-200 * rate, 200 * rate, 8001))
    integral_x, _ = curve.integrated_variances()
    _check(failures, abs(integral_x / sol.variances.var_x - 1.0) <= 0.01,
           f"spectrum integral {integral_x:.5f} vs var_x "
           f"{sol.variances.var_x:.5f}")
    narrow = quadrature_spectrum(sol, np.linspace(-6 * rate, 6 * rate, 6001))
    width = lorentzian_halfwidth(narrow, "x")
    expected = 1.0 - math.sqrt(sol.mean_field.pump_intensity)
    _check(failures, abs(width / expected - 1.0) <= 0.01,
           f"half-width {width:.6f} vs {expected:.6f}")
    _verdict(11, "spectra consistent with steady moments", failures)


def test_criterion_12_marginal_shapes():
    failures = []
    g = 0.01
    drives = (1.0 - g, 1.0 - g * g / 4.0)
    distances = []
    for drive in drives:
        params = NormalizedParams(drive=drive, decay_ratio=1000.0, coupling=g)
        exact = marginal_curve(params, axis="x_plus")
        sol = find_branch(solve_branches(params), Branch.BELOW)
        gauss = gaussian_marginal_curve(
            "x_plus", exact.grid, sol.variances.var_x, sol.variances.var_y,
            0.0, g, broken=False,
        )
        distances.append(compare_marginals(exact, gauss).l1_distance)
        if drive == 1.0 - g:
            _check(failures, len(exact.mode_locations()) == 1,
                   "not unimodal below threshold")
    params = NormalizedParams(drive=1.0 + 2 * g, decay_ratio=1000.0, coupling=g)
    exact = marginal_curve(params, axis="x_plus")
    _check(failures, len(exact.mode_locations()) == 2,
           "not bimodal above threshold")
    _check(failures, distances[0] < distances[1],
           "Gaussian mismatch does not grow toward threshold")
    _verdict(12, "exact marginal shapes and Gaussian mismatch", failures)
