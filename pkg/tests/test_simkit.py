import numpy as np
import pytest

from rscs_dm.analysis import SinrDistributionParams
from rscs_dm.core import Position, SystemConfig
from rscs_dm.simkit import (CurvePoint, ExperimentSpec, curve_to_csv, parallel_map,
                            provenance_header, run_fig3_fig4, run_fig5, run_fig6, run_fig7,
                            validate_sinr_distribution)

THETA = np.arange(0.0, 180.0 + 1e-9, 1.0)
RANGE = np.arange(0.0, 1000.0 + 1e-9, 4.0)


def test_parallel_map_keeps_order(monkeypatch):
    monkeypatch.setenv("RSCS_THREADS", "4")
    assert parallel_map(lambda x: x * x, list(range(20))) == [x * x for x in range(20)]


def test_provenance_header_is_one_line(cfg):
    h = provenance_header(cfg, sweep="snr_db")
    assert h.startswith("# ") and "\n" not in h
    assert "n_antennas=8" in h and "sweep=snr_db" in h


def test_curve_point_rejects_negative_stderr():
    with pytest.raises(ValueError):
        CurvePoint(0.0, 1.0, 1.0, -0.1)


def test_curve_csv():
    text = curve_to_csv([CurvePoint(1.0, 2.0, 3.0, 0.5)], "# h", ["argmax=1"])
    assert text.splitlines() == ["# h", "x,y_theory,y_empirical,y_stderr",
                                 "1.0,2.0,3.0,0.5", "# argmax=1"]


def test_bad_sweep(cfg):
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, "carrier_hz", (1.0,))


def test_fig3_peaks_and_widths(cfg, tmp_path):
    spec = ExperimentSpec(cfg, "bandwidth_hz", (5e6, 20e6, 100e6), 1, 0)
    res = run_fig3_fig4(spec, tmp_path, THETA, RANGE)
    assert all((r.peak_theta_deg, r.peak_range_m) == (60.0, 500.0) for r in res)
    widths = [r.width_range_m for r in res]
    assert widths[0] > widths[1] > widths[2]
    assert (tmp_path / "fig3_summary.csv").exists()
    assert (tmp_path / "fig3_bandwidth_hz_5000000.0.csv").exists()


def test_fig4_angle_width(cfg):
    spec = ExperimentSpec(cfg, "n_antennas", (8, 32, 128), 1, 0)
    w = [r.width_theta_deg for r in run_fig3_fig4(spec, None, THETA, RANGE)]
    assert w[0] > w[1] > w[2]


def test_fig5(cfg):
    spec = ExperimentSpec(cfg, "beta1_sq", (0.1, 0.5, 0.9), 1, 0)
    res = run_fig5(spec, None, THETA, RANGE)
    peaks = [r.peak_sinr for r in res]
    assert peaks[2] > peaks[1] > peaks[0]
    full = cfg.power_watts / cfg.noise_variance
    for r in res:
        assert r.peak_sinr / full == pytest.approx(r.value, rel=1e-12)
    medians = [np.median(r.map.values) for r in res]
    assert medians[2] > medians[1] > medians[0]


def test_fig6_theory_monotone(cfg):
    spec = ExperimentSpec(cfg, "snr_db", (-10.0, 0.0, 10.0, 20.0), 5, 0)
    ys = [p.y_theory for p in run_fig6(spec, None, theory_only=True).points]
    assert all(b >= a for a, b in zip(ys, ys[1:]))


def test_fig7_endpoint_is_no_an(cfg):
    spec = ExperimentSpec(cfg.replace(n_antennas=32).with_snr_db(20.0), "beta1_sq",
                          (0.5, 1.0), 3, 0)
    res = run_fig7(spec, None, theory_only=True)
    assert res.points[-1].y_theory == res.non_an
    with pytest.raises(ValueError):
        run_fig7(ExperimentSpec(cfg, "beta1_sq", (0.0,), 1, 0))


def test_curves_deterministic_across_workers(cfg, monkeypatch):
    spec = ExperimentSpec(cfg, "snr_db", (0.0, 10.0), 6, 3)
    monkeypatch.setenv("RSCS_THREADS", "1")
    one = run_fig6(spec).points
    monkeypatch.setenv("RSCS_THREADS", "3")
    assert run_fig6(spec).points == one


def test_sinr_distribution_report():
    rep = validate_sinr_distribution(SinrDistributionParams(2.0, 1.0, 1.0), 50_000, 0)
    assert rep["self_consistent_ks"] < 0.01
    assert rep["raw_mean_ratio"] > 1.5
    zero = validate_sinr_distribution(SinrDistributionParams(0.0, 1.0, 1.0), 100, 0)
    assert all(v == 0 for k, v in zero.items() if k != "n")
