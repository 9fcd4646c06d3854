"""
Sample-level OFDM receive chain: tone synthesis at a position, N-point DFT,
and combining of the active subchannels.

This path sums the N_T tones sample by sample and never touches the
closed-form steering algebra beyond the per-antenna phases psi_n, so it
serves as the reference against which the closed forms are checked.

Noise convention: ``noise_variance`` is the per-subchannel variance
sigma_n^2. A time sample spans all N subchannels, so time-domain noise is
drawn with variance N * sigma_n^2; after the 1/N-normalized DFT each bin then
carries variance sigma_n^2 and the useful bin carries rho * x.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Position, SystemConfig, derive_rng, path_loss
from .rscs import SubcarrierSelection
from .steering import psi_vector

__all__ = ["TimeSeries", "SpectrumBins", "synthesize", "synthesize_received",
           "dft", "idft", "combine_bins", "series_to_csv"]

COMBINE_MODES = ("active-only", "all")


@dataclass(frozen=True)
class TimeSeries:
    samples: np.ndarray = field(repr=False)
    rate: float

    def __post_init__(self):
        if np.ndim(self.samples) < 1:
            raise ValueError("a time series needs at least one axis")

    def __len__(self):
        return self.samples.shape[-1]


@dataclass(frozen=True)
class SpectrumBins:
    bins: np.ndarray = field(repr=False)
    normalized: bool = True

    def __len__(self):
        return self.bins.shape[-1]


def _tone_matrix(pos: Position, selection: SubcarrierSelection, cfg: SystemConfig):
    """(N_T, N) matrix of exp(j 2 pi (eta(n) m / N - psi_n))."""
    N = cfg.n_subcarriers
    m = np.arange(N)
    # eta(n) df m dT = eta(n) m / N, reduced modulo N in integers
    cycles = ((selection.eta[:, None] * m[None, :]) % N) / N
    cycles = cycles - psi_vector(selection, pos.theta, pos.R, cfg)[:, None]
    return np.exp(2j * np.pi * np.mod(cycles, 1.0))


def synthesize(pos: Position, weights, selection: SubcarrierSelection,
               cfg: SystemConfig, rng: Optional[np.random.Generator] = None,
               ref_range: Optional[float] = None) -> TimeSeries:
    """Received baseband samples for arbitrary per-antenna amplitudes.

    ``weights`` has shape (N_T,) or (K, N_T): antenna n radiates
    ``weights[..., n]`` on subcarrier eta(n). The result has shape (N,) or
    (K, N). Noise is added when ``rng`` is given.
    """
    weights = np.asarray(weights, dtype=complex)
    if weights.shape[-1] != selection.n_antennas:
        raise ValueError("weights must have one entry per antenna")
    rho = path_loss(cfg, pos.R, ref_range if ref_range is not None else pos.R)
    r = rho * (weights @ _tone_matrix(pos, selection, cfg))
    if rng is not None:
        std = math.sqrt(cfg.n_subcarriers * cfg.noise_variance / 2.0)
        r = r + std * (rng.standard_normal(r.shape) + 1j * rng.standard_normal(r.shape))
    return TimeSeries(r, cfg.bandwidth_hz)


def synthesize_received(pos: Position, x: complex, phases, selection: SubcarrierSelection,
                        cfg: SystemConfig, noise_seed=None,
                        ref_range: Optional[float] = None) -> TimeSeries:
    """r[m] = rho x sum_n exp(j[2 pi (eta(n) m / N - psi_n) + phi_n]) + noise.

    ``noise_seed=None`` gives the noiseless signal.
    """
    phases = np.asarray(phases, dtype=float)
    rng = None if noise_seed is None else derive_rng(noise_seed)
    return synthesize(pos, x * np.exp(1j * phases), selection, cfg, rng, ref_range)


def dft(ts: TimeSeries, n_points: Optional[int] = None, normalize: bool = True) -> SpectrumBins:
    """y(q) = sum_m r[m] exp(-j 2 pi m q / N), divided by N when ``normalize``."""
    N = len(ts)
    if n_points is not None and N != n_points:
        raise ValueError(f"expected {n_points} samples, got {N}")
    y = np.fft.fft(ts.samples, axis=-1)
    if normalize:
        y = y / N
    return SpectrumBins(y, normalize)


def idft(bins: SpectrumBins, rate: float = 1.0) -> TimeSeries:
    N = len(bins)
    r = np.fft.ifft(bins.bins, axis=-1)
    if bins.normalized:
        r = r * N
    return TimeSeries(r, rate)


def combine_bins(bins: SpectrumBins, selection: SubcarrierSelection,
                 mode: str = "active-only"):
    """Sum of the active subchannels (block-level receiver) or of all N bins."""
    if mode == "active-only":
        return bins.bins[..., selection.eta].sum(axis=-1)
    if mode == "all":
        return bins.bins.sum(axis=-1)
    raise ValueError(f"mode must be one of {COMBINE_MODES}, got {mode!r}")


def series_to_csv(values, header: str = "") -> str:
    """``index,re,im`` lines for a 1-D complex array."""
    values = np.asarray(values).ravel()
    buf = io.StringIO()
    if header:
        buf.write(header if header.endswith("\n") else header + "\n")
    buf.write("index,re,im\n")
    for i, v in enumerate(values):
        buf.write(f"{i},{float(v.real)!r},{float(v.imag)!r}\n")
    return buf.getvalue()
