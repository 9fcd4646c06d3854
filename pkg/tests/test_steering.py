import math

import numpy as np
import pytest

from rscs_dm.core import C_LIGHT, Position, SystemConfig
from rscs_dm.rscs import SubcarrierSelection, draw_selection, uniform_selection
from rscs_dm.steering import correlation, psi, psi_vector, steering_vector


def test_psi_first_antenna_zero_subcarrier(cfg, desired):
    sel = SubcarrierSelection((0, 5), 1024)
    assert psi(1, sel, desired, cfg) == 0.0


def test_psi_first_antenna(cfg, desired):
    sel = SubcarrierSelection((37, 5), 1024)
    assert psi(1, sel, desired, cfg) == pytest.approx(37 * cfg.delta_f * 500.0 / C_LIGHT,
                                                      rel=1e-15)


def test_psi_brute_substitution(cfg):
    # R_2 = 500 - 0.05 * cos 60deg = 499.975 m
    sel = SubcarrierSelection((0, 128), 1024)
    pos = Position.from_degrees(60.0, 500.0)
    expected = 128 * 4882.8125 * 499.975 / 3e8 - 3e9 * 0.05 * 0.5 / 3e8
    assert psi(2, sel, pos, cfg) == pytest.approx(expected, rel=1e-12)
    assert psi_vector(sel, pos.theta, pos.R, cfg)[1] == pytest.approx(expected, rel=1e-12)


def test_unit_modulus(cfg, desired):
    a = steering_vector(desired, draw_selection(cfg, 4), cfg).elements
    assert np.allclose(np.abs(a), 1.0, atol=1e-15)


def test_single_antenna(desired):
    cfg = SystemConfig(n_antennas=1)
    sel = SubcarrierSelection((9,), 1024)
    a = steering_vector(desired, sel, cfg)
    # a^H carries exp(-j 2 pi eta df R / c)
    assert a.h[0] == pytest.approx(np.exp(-2j * np.pi * 9 * cfg.delta_f * 500.0 / C_LIGHT))


def test_self_correlation(cfg, desired):
    sel = draw_selection(cfg, 8)
    assert correlation(desired, desired, sel, cfg) == pytest.approx(8.0, abs=1e-12)
    assert correlation(desired, desired, sel, cfg, exact=True) == pytest.approx(8.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_angle_null_any_selection(cfg, desired, seed):
    sel = draw_selection(cfg, seed)
    theta_a = math.acos(math.cos(desired.theta) + 2.0 / cfg.n_antennas)
    val = correlation(Position(theta_a, desired.R), desired, sel, cfg)
    assert abs(val) < 1e-9


def test_range_null_uniform(cfg, desired):
    sel = uniform_selection(cfg)
    pos = Position(desired.theta, desired.R + C_LIGHT / cfg.bandwidth_hz)
    assert abs(correlation(pos, desired, sel, cfg)) < 1e-9
    assert abs(correlation(pos, desired, sel, cfg, exact=True)) < 1e-9


def test_exact_close_to_approximate(cfg, desired):
    sel = draw_selection(cfg, 2)
    pos = Position.from_degrees(80.0, 700.0)
    approx = correlation(pos, desired, sel, cfg)
    exact = correlation(pos, desired, sel, cfg, exact=True)
    assert abs(approx - exact) < 0.05


def test_mismatched_selections_rejected(cfg, desired):
    a, b = draw_selection(cfg, 1), draw_selection(cfg, 2)
    with pytest.raises(ValueError):
        correlation(desired, desired, (a, b), cfg)


def test_selection_grid_mismatch(desired):
    sel = SubcarrierSelection((1, 2), 16)
    with pytest.raises(ValueError):
        steering_vector(desired, sel, SystemConfig(n_antennas=2))
