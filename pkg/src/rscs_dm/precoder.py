"""
Phase-alignment beamformer, null-space artificial-noise projector and the
spatial-frequency transmit codeword.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Position, SystemConfig
from .rscs import SubcarrierSelection
from .steering import steering_vector

__all__ = ["Beamformer", "AnProjector", "Codeword", "phase_alignment",
           "null_space_projector", "draw_an", "assemble_codeword"]


@dataclass(frozen=True)
class Beamformer:
    v: np.ndarray = field(repr=False)
    theta0: float = 0.0

    @property
    def phases(self) -> np.ndarray:
        """Per-antenna initial phases phi_n in radians."""
        return np.angle(self.v)

    def __len__(self):
        return len(self.v)


@dataclass(frozen=True)
class AnProjector:
    T: np.ndarray = field(repr=False)
    w_sigma2: float = 1.0


@dataclass(frozen=True)
class Codeword:
    S: np.ndarray = field(repr=False)
    E: np.ndarray = field(repr=False)

    def antenna_weights(self) -> np.ndarray:
        """Complex amplitude carried by each antenna on its own subcarrier."""
        rows = np.argmax(self.E, axis=0)
        return self.S[rows, np.arange(self.S.shape[1])]


def phase_alignment(desired: Position, selection: SubcarrierSelection,
                    cfg: SystemConfig, theta0: float = 0.0) -> Beamformer:
    """v = exp(j theta0) a(theta_D, R_D) / sqrt(N_T).

    Every antenna then satisfies phi_n - 2 pi psi_Dn = theta0, so all N_T
    tones add coherently at the desired receiver.
    """
    a = steering_vector(desired, selection, cfg).elements
    v = np.exp(1j * theta0) * a / math.sqrt(len(a))
    v.setflags(write=False)
    return Beamformer(v, theta0)


def null_space_projector(desired: Position, selection: SubcarrierSelection,
                         cfg: SystemConfig) -> AnProjector:
    """T = I - a a^H / N_T, the projector onto the complement of a(theta_D, R_D)."""
    a = steering_vector(desired, selection, cfg).elements
    n_t = len(a)
    T = np.eye(n_t, dtype=complex) - np.outer(a, a.conj()) / n_t
    T.setflags(write=False)
    return AnProjector(T)


def draw_an(cfg: SystemConfig, rng: np.random.Generator, size=None) -> np.ndarray:
    """w ~ CN(0, I_{N_T}); ``size`` prepends batch dimensions."""
    shape = (cfg.n_antennas,) if size is None else tuple(np.atleast_1d(size)) + (cfg.n_antennas,)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def assemble_codeword(x: complex, bf: Beamformer, proj: AnProjector, w,
                      selection: SubcarrierSelection, cfg: SystemConfig) -> Codeword:
    """S = sqrt(P_S) b1 E diag(v) x + sqrt(P_S) b2 E diag(T w)."""
    w = np.asarray(w, dtype=complex)
    n_t = selection.n_antennas
    if len(bf.v) != n_t or proj.T.shape != (n_t, n_t) or w.shape != (n_t,):
        raise ValueError(
            f"dimension mismatch: selection has {n_t} antennas, beamformer "
            f"{len(bf.v)}, projector {proj.T.shape}, noise vector {w.shape}")
    E = selection.selection_matrix()
    amp = math.sqrt(cfg.power_watts)
    S = amp * cfg.beta1 * E * (bf.v * x) + amp * cfg.beta2 * E * (proj.T @ w)
    return Codeword(S, E)
