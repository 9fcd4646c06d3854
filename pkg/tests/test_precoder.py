import numpy as np
import pytest

from rscs_dm.core import SystemConfig, derive_rng
from rscs_dm.precoder import (assemble_codeword, draw_an, null_space_projector,
                              phase_alignment)
from rscs_dm.rscs import draw_selection
from rscs_dm.steering import steering_vector


@pytest.mark.parametrize("n_t", [8, 32, 128])
def test_projector_identities(desired, n_t):
    cfg = SystemConfig(n_antennas=n_t)
    sel = draw_selection(cfg, n_t)
    T = null_space_projector(desired, sel, cfg).T
    a = steering_vector(desired, sel, cfg).elements
    assert np.linalg.norm(T @ a) <= 1e-10 * np.sqrt(n_t)
    assert np.linalg.norm(T @ T - T) <= 1e-10
    assert np.allclose(T, T.conj().T)
    assert np.trace(T).real == pytest.approx(n_t - 1)


def test_phase_alignment_coherent(cfg, desired):
    sel = draw_selection(cfg, 0)
    bf = phase_alignment(desired, sel, cfg)
    a = steering_vector(desired, sel, cfg).elements
    assert np.linalg.norm(bf.v) == pytest.approx(1.0)
    assert np.vdot(a, bf.v) == pytest.approx(np.sqrt(8.0))
    assert np.allclose(np.exp(1j * bf.phases), bf.v * np.sqrt(8))


def test_codeword_without_an_has_full_power(cfg, desired):
    cfg = cfg.with_beta1_sq(1.0)
    sel = draw_selection(cfg, 0)
    cw = assemble_codeword(np.exp(0.3j), phase_alignment(desired, sel, cfg),
                           null_space_projector(desired, sel, cfg),
                           np.ones(8), sel, cfg)
    assert np.linalg.norm(cw.S) ** 2 == pytest.approx(cfg.power_watts, rel=1e-12)
    assert cw.S.shape == (1024, 8)
    assert np.count_nonzero(np.abs(cw.S) > 0) == 8


def test_an_only_expected_power(cfg, desired):
    cfg = cfg.with_beta1_sq(0.0)
    sel = draw_selection(cfg, 0)
    bf = phase_alignment(desired, sel, cfg)
    proj = null_space_projector(desired, sel, cfg)
    rng = derive_rng(1)
    powers = [np.linalg.norm(assemble_codeword(1.0, bf, proj, w, sel, cfg).S) ** 2
              for w in draw_an(cfg, rng, size=10_000)]
    expected = cfg.power_watts * (cfg.n_antennas - 1)
    assert np.mean(powers) == pytest.approx(expected, rel=0.03)


def test_antenna_weights(cfg, desired):
    sel = draw_selection(cfg, 0)
    bf = phase_alignment(desired, sel, cfg)
    proj = null_space_projector(desired, sel, cfg)
    w = draw_an(cfg, derive_rng(2))
    cw = assemble_codeword(1j, bf, proj, w, sel, cfg)
    amp = np.sqrt(cfg.power_watts)
    expected = amp * cfg.beta1 * bf.v * 1j + amp * cfg.beta2 * proj.T @ w
    assert np.allclose(cw.antenna_weights(), expected)


def test_dimension_mismatch(cfg, desired):
    sel = draw_selection(cfg, 0)
    with pytest.raises(ValueError, match="dimension"):
        assemble_codeword(1.0, phase_alignment(desired, sel, cfg),
                          null_space_projector(desired, sel, cfg), np.ones(7), sel, cfg)
