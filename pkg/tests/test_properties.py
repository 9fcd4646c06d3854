"""Property tests over random geometries and selections."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from rscs_dm.analysis import SinrDistributionParams, sinr_cdf, sinr_mean
from rscs_dm.core import Position, SystemConfig
from rscs_dm.precoder import null_space_projector, phase_alignment
from rscs_dm.rscs import draw_selection
from rscs_dm.sinr import sinr_eavesdropper_lambda, sinr_general
from rscs_dm.steering import correlation, steering_vector
from rscs_dm.waveform import combine_bins, dft, synthesize_received

angles = st.floats(min_value=1.0, max_value=179.0)
ranges = st.floats(min_value=20.0, max_value=3000.0)
n_ants = st.sampled_from([1, 2, 4, 8, 16, 32])
seeds = st.integers(min_value=0, max_value=2**32 - 1)
FAST = settings(max_examples=60, deadline=None)


@FAST
@given(n_ants, seeds, angles, ranges)
def test_projector_annihilates_desired(n_t, seed, t, r):
    cfg = SystemConfig(n_antennas=n_t, n_subcarriers=256)
    pos = Position.from_degrees(t, r)
    sel = draw_selection(cfg, seed)
    T = null_space_projector(pos, sel, cfg).T
    a = steering_vector(pos, sel, cfg).elements
    assert np.linalg.norm(T @ a) <= 1e-10 * math.sqrt(n_t)
    assert np.linalg.norm(T @ T - T) <= 1e-10


@FAST
@given(n_ants, seeds, angles, ranges, angles, ranges)
def test_correlation_bounded_and_hermitian(n_t, seed, t1, r1, t2, r2):
    cfg = SystemConfig(n_antennas=n_t, n_subcarriers=256)
    sel = draw_selection(cfg, seed)
    a, b = Position.from_degrees(t1, r1), Position.from_degrees(t2, r2)
    for exact in (False, True):
        ab = correlation(a, b, sel, cfg, exact=exact)
        assert abs(ab) <= n_t + 1e-9
        assert np.isclose(ab, np.conj(correlation(b, a, sel, cfg, exact=exact)), atol=1e-9)


@FAST
@given(n_ants, seeds, angles, ranges, angles, ranges,
       st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=-10, max_value=30))
def test_sinr_never_exceeds_desired(n_t, seed, td, rd, te, re, b1, snr):
    cfg = SystemConfig(n_antennas=n_t, n_subcarriers=256).with_beta1_sq(b1).with_snr_db(snr)
    desired, eve = Position.from_degrees(td, rd), Position.from_degrees(te, re)
    sel = draw_selection(cfg, seed)
    bf, proj = phase_alignment(desired, sel, cfg), null_space_projector(desired, sel, cfg)
    s_d = sinr_general(desired, bf, proj, sel, cfg)
    s_e = sinr_general(eve, bf, proj, sel, cfg)
    assert math.isclose(s_d, b1 * cfg.power_watts / cfg.noise_variance, rel_tol=1e-9,
                        abs_tol=1e-12)
    assert s_e <= s_d * (1 + 1e-9) + 1e-12
    lam = abs(correlation(eve, desired, sel, cfg, exact=True)) ** 2 / n_t ** 2
    assert math.isclose(s_e, sinr_eavesdropper_lambda(min(lam, 1.0), cfg),
                        rel_tol=1e-7, abs_tol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 4, 8, 16]), seeds, angles, ranges, angles, ranges)
def test_time_domain_matches_closed_form(n_t, seed, td, rd, te, re):
    cfg = SystemConfig(n_antennas=n_t, n_subcarriers=64)
    desired, pos = Position.from_degrees(td, rd), Position.from_degrees(te, re)
    sel = draw_selection(cfg, seed)
    bf = phase_alignment(desired, sel, cfg)
    got = combine_bins(dft(synthesize_received(pos, 1.0, bf.phases, sel, cfg)), sel)
    want = math.sqrt(n_t) * np.vdot(steering_vector(pos, sel, cfg).elements, bf.v)
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_lambda_sinr_monotone(l1, l2):
    cfg = SystemConfig()
    lo, hi = sorted((l1, l2))
    assert sinr_eavesdropper_lambda(lo, cfg) <= sinr_eavesdropper_lambda(hi, cfg) + 1e-15


@given(st.floats(0.01, 100), st.floats(0.0, 100), st.floats(0.01, 100),
       st.floats(0.0, 1e3), st.floats(0.0, 1e3))
def test_cdf_monotone_in_unit_interval(e, a, b, x1, x2):
    p = SinrDistributionParams(e, a, b)
    lo, hi = sorted((x1, x2))
    f_lo, f_hi = sinr_cdf(lo, p), sinr_cdf(hi, p)
    assert 0.0 <= f_lo <= f_hi <= 1.0
    assert sinr_mean(p) > 0
