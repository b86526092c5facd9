import math

import pytest

from dopo_lab import (
    NormalizedParams,
    critical_moment,
    perturbative_predictions,
    threshold_variance_ratios,
)

_GAMMA_MOMENT = 4.0 * math.gamma(0.75) / math.gamma(0.25)


def test_threshold_moment_gamma_value():
    m2 = critical_moment(1.0, 0.01, order=2)
    assert m2 == pytest.approx(_GAMMA_MOMENT, abs=1e-9)


def test_threshold_moment_independent_of_coupling():
    # at drive exactly 1 the quartic weight has no coupling dependence
    for g in (0.002, 0.05):
        assert critical_moment(1.0, g) == pytest.approx(_GAMMA_MOMENT, abs=1e-9)


def test_odd_moments_vanish():
    assert critical_moment(1.003, 0.01, order=1) == 0.0
    assert critical_moment(0.997, 0.01, order=3) == 0.0


def test_zeroth_moment_is_one():
    assert critical_moment(1.001, 0.01, order=0) == pytest.approx(1.0, rel=1e-12)


def test_quartic_moment_integration_identity():
    # integration by parts on the quartic weight:
    # <x^4> = 4 (1 + 2 a <x^2>), a = (drive - 1) / (sqrt(2) g)
    for drive in (0.995, 1.0, 1.005):
        g = 0.01
        a = (drive - 1.0) / (math.sqrt(2.0) * g)
        m2 = critical_moment(drive, g, order=2)
        m4 = critical_moment(drive, g, order=4)
        assert m4 == pytest.approx(4.0 * (1.0 + 2.0 * a * m2), rel=1e-9)


def test_gaussian_limit_far_below():
    # deep below threshold the quartic term is negligible and the weight
    # is gaussian with variance 1/(2|a|)
    g = 0.01
    drive = 0.5
    a = (drive - 1.0) / (math.sqrt(2.0) * g)
    m2 = critical_moment(drive, g, order=2)
    assert m2 == pytest.approx(1.0 / (2.0 * abs(a)), rel=5e-3)


def test_predictions_at_threshold():
    p = NormalizedParams(drive=1.0, decay_ratio=1.0, coupling=0.01)
    pred = perturbative_predictions(p)
    assert pred.slow_moment == pytest.approx(_GAMMA_MOMENT, abs=1e-9)
    assert pred.pump_mean == pytest.approx(0.99761006, abs=1e-7)
    assert pred.var_x == pytest.approx(191.1955, abs=2e-3)
    assert pred.var_y == pytest.approx(0.50099581, abs=1e-7)
    assert pred.in_validity_window


def test_validity_window():
    g = 0.01
    near = perturbative_predictions(NormalizedParams(drive=1.001, coupling=g))
    far = perturbative_predictions(NormalizedParams(drive=1.05, coupling=g))
    assert near.validity_halfwidth == pytest.approx(g / math.sqrt(2.0), rel=1e-12)
    assert near.in_validity_window
    assert not far.in_validity_window


def test_variance_ratios():
    rx, ry = threshold_variance_ratios(1.0)
    assert rx == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert ry == pytest.approx(10.0 / 9.0, rel=1e-12)
    rx10, ry10 = threshold_variance_ratios(10.0)
    assert rx10 == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert ry10 == pytest.approx(16.0 / 9.0, rel=1e-12)
    # large damping ratio saturates the squeezing-depth ratio at 2
    _, ry_inf = threshold_variance_ratios(1e9)
    assert ry_inf == pytest.approx(2.0, rel=1e-8)


def test_pump_depletion_sign():
    # above threshold the slow moment grows and depletes the pump harder
    lo = perturbative_predictions(NormalizedParams(drive=0.998, coupling=0.01))
    hi = perturbative_predictions(NormalizedParams(drive=1.002, coupling=0.01))
    assert hi.slow_moment > lo.slow_moment
    assert hi.pump_mean - hi.drive_offset < 1.0
