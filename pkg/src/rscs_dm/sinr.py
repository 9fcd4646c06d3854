"""
Closed-form SINR at arbitrary positions, SINR maps over (angle, range) and a
waveform-level empirical SINR estimator.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import Position, SystemConfig, derive_rng, lin2db, path_loss
from .precoder import (AnProjector, Beamformer, draw_an, null_space_projector,
                       phase_alignment)
from .rscs import SelectionSchedule, SubcarrierSelection
from .steering import angle_phasors, range_phasors, steering_vector
from .waveform import combine_bins, dft, synthesize

__all__ = ["ReceiveDecomposition", "SinrMap", "sinr_general",
           "sinr_eavesdropper_lambda", "sinr_map", "correlation_grid",
           "sinr_from_correlation", "empirical_sinr", "peak_widths",
           "DEFAULT_THETA_GRID", "DEFAULT_RANGE_GRID"]

RECEIVER_MODES = ("active-only", "all-bins")

DEFAULT_THETA_GRID = np.round(np.arange(0.0, 180.0 + 1e-9, 0.5), 10)
DEFAULT_RANGE_GRID = np.round(np.arange(0.0, 1000.0 + 1e-9, 2.0), 10)


def _noise_bins(cfg: SystemConfig, receiver_mode: str) -> int:
    if receiver_mode == "active-only":
        return cfg.n_antennas
    if receiver_mode == "all-bins":
        return cfg.n_subcarriers
    raise ValueError(f"receiver_mode must be one of {RECEIVER_MODES}")


@dataclass(frozen=True)
class ReceiveDecomposition:
    """Combined receive sample split into message, AN and channel noise."""

    useful: complex
    an: complex
    noise_var: float


@dataclass(frozen=True)
class SinrMap:
    theta_deg: np.ndarray = field(repr=False)
    range_m: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # (len(theta_deg), len(range_m)), linear

    def __post_init__(self):
        if self.values.shape != (len(self.theta_deg), len(self.range_m)):
            raise ValueError("map values do not match the axes")

    def peak(self):
        """(theta_deg, range_m, value) of the grid maximum."""
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta_deg[i]), float(self.range_m[j]), float(self.values[i, j])

    def to_csv(self, header: str = "") -> str:
        buf = io.StringIO()
        if header:
            buf.write(header if header.endswith("\n") else header + "\n")
        buf.write("theta_deg,range_m,sinr_linear,sinr_db\n")
        db = lin2db(self.values)
        for i, t in enumerate(self.theta_deg):
            t = float(t)
            for j, r in enumerate(self.range_m):
                buf.write(f"{t!r},{float(r)!r},{float(self.values[i, j])!r},"
                          f"{float(db[i, j])!r}\n")
        return buf.getvalue()


def sinr_general(pos: Position, bf: Beamformer, proj: AnProjector,
                 selection: SubcarrierSelection, cfg: SystemConfig,
                 receiver_mode: str = "active-only",
                 ref_range: Optional[float] = None) -> float:
    """Average SINR at ``pos`` with AN power taken in expectation over w.

    rho^2 P b1^2 |a^H v|^2 / (rho^2 P b2^2 sigma_w^2 ||a^H T||^2 + M sigma_n^2),
    M = N_T for the active-only receiver and N for the all-bins receiver.
    ``ref_range`` is the path-loss reference (desired range) and only
    matters under the inverse-square policy.
    """
    M = _noise_bins(cfg, receiver_mode)
    a = steering_vector(pos, selection, cfg).elements
    rho = path_loss(cfg, pos.R, ref_range if ref_range is not None else pos.R)
    useful = abs(np.vdot(a, bf.v)) ** 2
    an = float(np.real(np.vdot(a, proj.T @ (proj.T.conj().T @ a)))) * proj.w_sigma2
    num = rho ** 2 * cfg.power_watts * cfg.beta1_sq * useful
    den = rho ** 2 * cfg.power_watts * cfg.beta2_sq * an + M * cfg.noise_variance
    return float(num / den)


def sinr_eavesdropper_lambda(lam, cfg: SystemConfig, rho: float = 1.0):
    """mu1 lam / (mu2 (1 - lam) + mu3), the eavesdropper SINR as a function of
    the normalized correlation lam = |a_E^H a_D|^2 / N_T^2 in [0, 1]."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < -1e-12) or np.any(lam_arr > 1 + 1e-12):
        raise ValueError("lambda must lie in [0, 1]")
    lam_arr = np.clip(lam_arr, 0.0, 1.0)
    mu1 = rho ** 2 * cfg.power_watts * cfg.beta1_sq
    mu2 = rho ** 2 * cfg.power_watts * cfg.beta2_sq
    mu3 = cfg.noise_variance
    out = mu1 * lam_arr / (mu2 * (1.0 - lam_arr) + mu3)
    return out if out.ndim else float(out)


def correlation_grid(desired: Position, selection: SubcarrierSelection,
                     cfg: SystemConfig, theta_rad, range_m) -> np.ndarray:
    """a^H(theta_i, R_j) a(desired) for every grid point, shape (n_theta, n_range).

    Each steering element factors into a range part and an angle part, so
    the whole grid is one (n_theta x N_T) @ (N_T x n_range) product.
    """
    a_d = steering_vector(desired, selection, cfg).elements
    ang = np.conj(angle_phasors(selection, np.asarray(theta_rad, float), cfg))
    rng_ = np.conj(range_phasors(selection, np.asarray(range_m, float), cfg))
    return (ang * a_d) @ rng_.T


def sinr_from_correlation(corr, cfg: SystemConfig, receiver_mode: str = "active-only",
                          rho=1.0):
    """SINR under phase alignment + null-space AN from a^H(pos) a(desired)."""
    n_t = cfg.n_antennas
    M = _noise_bins(cfg, receiver_mode)
    g = np.abs(corr) ** 2 / n_t                  # |a^H v|^2
    an = np.maximum(n_t - g, 0.0)                # a^H T a
    rho2 = np.asarray(rho, dtype=float) ** 2
    num = rho2 * cfg.power_watts * cfg.beta1_sq * g
    den = rho2 * cfg.power_watts * cfg.beta2_sq * an + M * cfg.noise_variance
    return num / den


def _rho_grid(cfg, range_m, desired):
    if cfg.rho_policy == "unit":
        return 1.0
    return path_loss(cfg, np.asarray(range_m, float), desired.R)[None, :]


def sinr_map(desired: Position, selection: SubcarrierSelection, cfg: SystemConfig,
             theta_grid=None, range_grid=None,
             receiver_mode: str = "active-only") -> SinrMap:
    """SINR over a (theta, R) grid for phase alignment + null-space AN aimed
    at ``desired``. Grids are in degrees and metres."""
    theta_deg = np.asarray(DEFAULT_THETA_GRID if theta_grid is None else theta_grid, float)
    range_m = np.asarray(DEFAULT_RANGE_GRID if range_grid is None else range_grid, float)
    if theta_deg.size == 0 or range_m.size == 0:
        raise ValueError("map grids must be nonempty")
    corr = correlation_grid(desired, selection, cfg, np.radians(theta_deg), range_m)
    values = sinr_from_correlation(corr, cfg, receiver_mode,
                                   _rho_grid(cfg, range_m, desired))
    return SinrMap(theta_deg, range_m, values)


def _cut(desired, selection, cfg, axis, receiver_mode):
    def f(offset):
        if axis == "theta":
            corr = correlation_grid(desired, selection, cfg,
                                    np.array([desired.theta + offset]),
                                    np.array([desired.R]))
        else:
            corr = correlation_grid(desired, selection, cfg,
                                    np.array([desired.theta]),
                                    np.array([desired.R + offset]))
        return float(sinr_from_correlation(corr, cfg, receiver_mode)[0, 0])
    return f


def peak_widths(desired: Position, selection: SubcarrierSelection, cfg: SystemConfig,
                level_db: float = -3.0, receiver_mode: str = "active-only"):
    """Main-lobe widths of the SINR peak along angle (degrees) and range (m).

    Each 1-D cut through ``desired`` is walked outwards until the SINR falls
    below peak * 10^(level_db/10), then the crossing is refined by root
    finding. Independent of any map grid resolution.
    """
    peak = sinr_from_correlation(
        np.array(selection.n_antennas, dtype=complex), cfg, receiver_mode)
    target = float(peak) * 10.0 ** (level_db / 10.0)
    # first-null scales set the walking step
    steps = {"theta": 2.0 / cfg.n_antennas / 40.0, "range": cfg.c / cfg.bandwidth_hz / 40.0}
    widths = {}
    for axis in ("theta", "range"):
        f = _cut(desired, selection, cfg, axis, receiver_mode)
        edges = []
        for sign in (-1.0, 1.0):
            step = sign * steps[axis]
            lo, hi = 0.0, step
            for _ in range(4000):
                if f(hi) < target:
                    break
                lo, hi = hi, hi + step
            else:
                raise RuntimeError(f"no {level_db} dB crossing found along {axis}")
            edges.append(brentq(lambda o: f(o) - target, min(lo, hi), max(lo, hi),
                                xtol=1e-12 if axis == "theta" else 1e-9))
        width = edges[1] - edges[0]
        widths[axis] = math.degrees(width) if axis == "theta" else width
    return widths["theta"], widths["range"]


def empirical_sinr(pos: Position, desired: Position, sched: SelectionSchedule,
                   cfg: SystemConfig, n_symbols: Optional[int] = None, seed: int = 0,
                   receiver_mode: str = "active-only", return_parts: bool = False):
    """SINR measured from the sample-level chain.

    For every OFDM symbol: draw a unit-modulus QPSK symbol, an AN vector
    w ~ CN(0, I) and time-domain noise, transmit the codeword of phase
    alignment + null-space AN aimed at ``desired`` (recomputed per RSCS
    block), synthesize the received samples at ``pos``, DFT and combine.
    The useful part is obtained by running the same chain with only the
    message branch; the rest is AN plus noise. Returns the ratio of their
    time-averaged powers.
    """
    n_symbols = sched.n_symbols if n_symbols is None else int(n_symbols)
    if n_symbols < 1 or n_symbols > sched.n_symbols:
        raise ValueError("n_symbols must be between 1 and the schedule length")
    combine_mode = "active-only" if receiver_mode == "active-only" else "all"
    _noise_bins(cfg, receiver_mode)
    amp = math.sqrt(cfg.power_watts)
    p_useful = 0.0
    p_impair = 0.0
    done = 0
    for b, (selection, used) in enumerate(sched.blocks()):
        if done >= n_symbols:
            break
        used = min(used, n_symbols - done)
        rng = derive_rng(seed, b)
        bf = phase_alignment(desired, selection, cfg)
        proj = null_space_projector(desired, selection, cfg)
        qpsk = rng.integers(0, 4, size=used)
        x = np.exp(1j * (np.pi / 4 + np.pi / 2 * qpsk))
        w = draw_an(cfg, rng, size=used)
        w_useful = amp * cfg.beta1 * x[:, None] * bf.v[None, :]
        w_total = w_useful + amp * cfg.beta2 * (w @ proj.T.T)
        r_total = synthesize(pos, w_total, selection, cfg, rng=rng, ref_range=desired.R)
        r_useful = synthesize(pos, w_useful, selection, cfg, ref_range=desired.R)
        z_total = combine_bins(dft(r_total), selection, combine_mode)
        z_useful = combine_bins(dft(r_useful), selection, combine_mode)
        p_useful += float(np.sum(np.abs(z_useful) ** 2))
        p_impair += float(np.sum(np.abs(z_total - z_useful) ** 2))
        done += used
    value = p_useful / p_impair if p_impair > 0 else math.inf
    if return_parts:
        return value, p_useful / done, p_impair / done
    return value
