import math

import numpy as np
import pytest

from rscs_dm.analysis import first_nulls
from rscs_dm.core import Position, SystemConfig
from rscs_dm.precoder import null_space_projector, phase_alignment
from rscs_dm.rscs import draw_selection, schedule, uniform_selection
from rscs_dm.sinr import (SinrMap, correlation_grid, empirical_sinr, peak_widths,
                          sinr_eavesdropper_lambda, sinr_general, sinr_map)
from rscs_dm.steering import correlation, steering_vector


def _parts(desired, cfg, seed=0):
    sel = draw_selection(cfg, seed)
    return sel, phase_alignment(desired, sel, cfg), null_space_projector(desired, sel, cfg)


def test_desired_sinr_closed_form(cfg, desired):
    sel, bf, proj = _parts(desired, cfg)
    assert sinr_general(desired, bf, proj, sel, cfg) == pytest.approx(5.0, rel=1e-12)


def test_desired_sinr_inverse_square(desired):
    cfg = SystemConfig(rho_policy="inverse-square")
    sel, bf, proj = _parts(desired, cfg)
    assert sinr_general(desired, bf, proj, sel, cfg) == pytest.approx(5.0, rel=1e-12)


def test_no_an_reduces_to_matched_gain(desired):
    cfg = SystemConfig().with_beta1_sq(1.0)
    sel, bf, proj = _parts(desired, cfg)
    pos = Position.from_degrees(70.0, 450.0)
    a = steering_vector(pos, sel, cfg).elements
    expected = abs(np.vdot(a, bf.v)) ** 2 * cfg.power_watts / (8 * cfg.noise_variance)
    assert sinr_general(pos, bf, proj, sel, cfg) == pytest.approx(expected, rel=1e-12)


def test_all_bins_receiver_has_more_noise(cfg, desired):
    sel, bf, proj = _parts(desired, cfg)
    s = sinr_general(desired, bf, proj, sel, cfg, receiver_mode="all-bins")
    assert s == pytest.approx(5.0 * 8 / 1024)
    with pytest.raises(ValueError):
        sinr_general(desired, bf, proj, sel, cfg, receiver_mode="some")


def test_lambda_form(cfg):
    assert sinr_eavesdropper_lambda(0.0, cfg) == 0.0
    assert sinr_eavesdropper_lambda(1.0, cfg) == pytest.approx(5.0)
    assert sinr_eavesdropper_lambda(0.0506, cfg) == pytest.approx(0.0440, abs=5e-4)
    with pytest.raises(ValueError):
        sinr_eavesdropper_lambda(1.5, cfg)


def test_lambda_form_matches_general(cfg, desired):
    sel, bf, proj = _parts(desired, cfg, seed=3)
    for pos in (Position.from_degrees(30, 200), Position.from_degrees(95, 700)):
        lam = abs(correlation(pos, desired, sel, cfg, exact=True)) ** 2 / 64
        assert sinr_eavesdropper_lambda(lam, cfg) == pytest.approx(
            sinr_general(pos, bf, proj, sel, cfg), rel=1e-9)


def test_correlation_grid_matches_pointwise(cfg, desired):
    sel = draw_selection(cfg, 6)
    theta = np.radians([20.0, 60.0, 133.0])
    rng_ = np.array([10.0, 500.0, 917.0])
    grid = correlation_grid(desired, sel, cfg, theta, rng_)
    for i, t in enumerate(theta):
        for j, r in enumerate(rng_):
            val = correlation(Position(t, r), desired, sel, cfg, exact=True)
            assert grid[i, j] == pytest.approx(val, abs=1e-10)


def test_map_peak_at_desired(cfg, desired):
    smap = sinr_map(desired, draw_selection(cfg, 0), cfg)
    t, r, v = smap.peak()
    assert (t, r) == (60.0, 500.0)
    assert v == pytest.approx(5.0)
    assert smap.values.shape == (361, 501)


def test_map_csv_layout(cfg, desired):
    smap = sinr_map(desired, uniform_selection(cfg), cfg, [50.0, 60.0], [500.0, 502.0, 504.0])
    lines = smap.to_csv("# p").splitlines()
    assert lines[:2] == ["# p", "theta_deg,range_m,sinr_linear,sinr_db"]
    assert len(lines) == 2 + 6
    assert lines[2].startswith("50.0,500.0,") and lines[5].startswith("60.0,500.0,")


def test_map_shape_check():
    with pytest.raises(ValueError):
        SinrMap(np.zeros(2), np.zeros(3), np.zeros((3, 2)))


def test_peak_widths_scale_with_bandwidth(desired):
    base = SystemConfig()
    wide = SystemConfig(bandwidth_hz=100e6)
    t5, r5 = peak_widths(desired, uniform_selection(base), base)
    t100, r100 = peak_widths(desired, uniform_selection(wide), wide)
    assert r100 / r5 == pytest.approx(0.05, rel=1e-6)
    assert t5 > 0 and abs(t100 - t5) / t5 < 0.05


def test_empirical_desired(cfg, desired):
    sched = schedule(cfg, "block", 1000, 4000, seed=1)
    assert empirical_sinr(desired, desired, sched, cfg, seed=2) == pytest.approx(5.0, rel=0.05)


def test_empirical_angle_null(cfg, desired):
    geo = first_nulls(desired, cfg)
    null = Position(geo.theta[0], desired.R)
    sched = schedule(cfg, "block", 500, 1000, seed=1)
    assert empirical_sinr(null, desired, sched, cfg, seed=0) <= 0.01


def test_empirical_without_message(desired):
    cfg = SystemConfig().with_beta1_sq(0.0)
    sched = schedule(cfg, "block", 100, 100, seed=1)
    assert empirical_sinr(desired, desired, sched, cfg) == 0.0


def test_empirical_bad_length(cfg, desired):
    with pytest.raises(ValueError):
        empirical_sinr(desired, desired, schedule(cfg, "block", 1, 5, 0), cfg, n_symbols=6)
