import numpy as np
import pytest

from dopo_lab import (
    Branch,
    NormalizedParams,
    build_stability_matrix,
    commutator_matrix,
    default_frequency_grid,
    find_branch,
    lorentzian_halfwidth,
    quadrature_correlations,
    quadrature_spectrum,
    solve_branches,
    stationary_covariance,
    two_time_correlator,
)


def _below(drive=0.5, kappa=1.0, g=0.01):
    p = NormalizedParams(drive=drive, decay_ratio=kappa, coupling=g)
    return find_branch(solve_branches(p), Branch.BELOW)


def _resolvent_spectra(sol, omegas):
    """Independent frequency-domain oracle for the spectra.

    One-sided transform of exp(L*tau) is the resolvent -(L + i*w)^(-1);
    no time discretization enters at all.
    """
    drift = build_stability_matrix(sol.mean_field, sol.params.decay_ratio)
    seed = stationary_covariance(sol) + commutator_matrix(sol)
    g2 = sol.params.coupling**2
    vx = np.array([0.0, 0.0, 1.0, 1.0])
    vy = np.array([0.0, 0.0, -1.0, 1.0])
    sx, sy = [], []
    eye = np.eye(4)
    for w in omegas:
        resolvent = -np.linalg.inv(drift + 1j * w * eye)
        m = resolvent @ seed
        sx.append(2.0 * (vx @ m @ vx).real / g2)
        sy.append(-2.0 * (vy @ m @ vy).real / g2)
    return np.array(sx), np.array(sy)


def test_covariance_is_moment_arrangement():
    sol = _below()
    c = stationary_covariance(sol)
    m = sol.moments
    assert c[2, 2] == m.signal_pair
    assert c[2, 3] == m.signal_occupation
    assert c[3, 2] == m.signal_occupation
    assert c[0, 1] == m.pump_occupation
    assert c[0, 2] == m.cross_pair
    assert c[0, 3] == m.cross_conj_pair
    assert c[1, 2] == np.conj(m.cross_conj_pair)
    np.testing.assert_allclose(c, c.T, atol=0)


def test_vacuum_covariance_is_zero():
    p = NormalizedParams(drive=0.0, decay_ratio=1.0, coupling=0.01)
    sol = find_branch(solve_branches(p), Branch.BELOW)
    assert np.abs(stationary_covariance(sol)).max() <= 1e-15


def test_zero_lag_correlator_is_covariance():
    sol = _below()
    np.testing.assert_allclose(
        two_time_correlator(sol, 0.0), stationary_covariance(sol),
        rtol=0, atol=1e-18,
    )


def test_lagged_correlator_against_eigendecomposition():
    sol = _below(drive=0.8)
    drift = build_stability_matrix(sol.mean_field, sol.params.decay_ratio)
    vals, vecs = np.linalg.eig(drift)
    for tau in (0.3, 1.7):
        prop = vecs @ np.diag(np.exp(vals * tau)) @ np.linalg.inv(vecs)
        expected = prop @ stationary_covariance(sol)
        np.testing.assert_allclose(
            two_time_correlator(sol, tau), expected, rtol=1e-10, atol=1e-16
        )


def test_negative_lag_rejected():
    with pytest.raises(ValueError):
        two_time_correlator(_below(), -0.1)


def test_zero_lag_quadrature_correlations_are_variances():
    sol = _below()
    taus = np.linspace(0.0, 5.0, 11)
    cx, cy = quadrature_correlations(sol, taus)
    assert cx[0] == pytest.approx(sol.variances.var_x, rel=1e-12)
    assert cy[0] == pytest.approx(sol.variances.var_y, rel=1e-12)


def test_correlations_decay():
    sol = _below()
    taus = np.linspace(0.0, 60.0, 601)
    cx, cy = quadrature_correlations(sol, taus)
    assert abs(cx[-1]) < 1e-10 * abs(cx[0])
    assert abs(cy[-1]) < 1e-10


def test_correlation_grid_must_be_uniform():
    sol = _below()
    with pytest.raises(ValueError):
        quadrature_correlations(sol, np.array([0.0, 0.1, 0.3]))


def test_spectrum_matches_resolvent_oracle():
    sol = _below()
    omegas = np.linspace(-3.0, 3.0, 7)
    curve = quadrature_spectrum(sol, omegas)
    sx, sy = _resolvent_spectra(sol, omegas)
    np.testing.assert_allclose(curve.spectrum_x, sx, rtol=5e-6, atol=1e-12)
    np.testing.assert_allclose(curve.spectrum_y, sy, rtol=5e-6, atol=1e-12)


def test_spectrum_above_branch_matches_resolvent():
    p = NormalizedParams(drive=2.0, decay_ratio=1.0, coupling=0.01)
    sol = find_branch(solve_branches(p), Branch.ABOVE_PLUS)
    omegas = np.linspace(-4.0, 4.0, 9)
    curve = quadrature_spectrum(sol, omegas)
    sx, sy = _resolvent_spectra(sol, omegas)
    np.testing.assert_allclose(curve.spectrum_x, sx, rtol=5e-6, atol=1e-10)
    np.testing.assert_allclose(curve.spectrum_y, sy, rtol=5e-6, atol=1e-10)


def test_sum_rule_below_threshold():
    sol = _below()
    rate = -sol.max_real_eigenvalue
    curve = quadrature_spectrum(sol, np.linspace(-200 * rate, 200 * rate, 8001))
    vx, _ = curve.integrated_variances()
    assert vx == pytest.approx(sol.variances.var_x, rel=1e-2)
    wide = quadrature_spectrum(sol, np.linspace(-650 * rate, 650 * rate, 12001))
    _, vy = wide.integrated_variances()
    assert vy == pytest.approx(sol.variances.var_y, rel=1e-2)


def test_lorentzian_halfwidth_below():
    sol = _below()
    rate = -sol.max_real_eigenvalue
    curve = quadrature_spectrum(sol, np.linspace(-6 * rate, 6 * rate, 6001))
    width = lorentzian_halfwidth(curve, "x")
    assert width == pytest.approx(1.0 - sol.mean_field.pump.real, rel=1e-3)


def test_spectrum_nonnegative():
    sol = _below(drive=0.9)
    curve = quadrature_spectrum(sol, default_frequency_grid(sol))
    assert curve.spectrum_x.min() > -1e-9
    assert curve.spectrum_y.min() > -1e-9


def test_phase_quadrature_spectrum_is_narrower_than_amplitude():
    sol = _below()
    curve = quadrature_spectrum(sol, np.array([0.0]))
    assert 0.0 < curve.spectrum_y[0] < curve.spectrum_x[0]
