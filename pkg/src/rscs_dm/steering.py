"""
Range- and angle-dependent steering vectors for an RSCS array.

Antenna n radiates on subcarrier eta(n), so its phase at (theta, R) is

    psi_n = eta(n) * df * R_n / c - f_c * n * d * cos(theta) / c,
    R_n   = R - n * d * cos(theta)

(0-based n). The stored vector is ``a`` with elements exp(+j 2 pi psi_n);
the receiver sees ``a^H``, whose elements are exp(-j 2 pi psi_n).
All phases are handled in cycles and wrapped to [0, 1) before
exponentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Position, SystemConfig
from .rscs import SubcarrierSelection

__all__ = ["SteeringVector", "psi", "psi_vector", "steering_vector",
           "steering_matrix", "range_phasors", "angle_phasors", "correlation",
           "cycles_to_phasor"]


def cycles_to_phasor(cycles):
    """exp(j 2 pi x) with x reduced modulo 1 first."""
    cycles = np.asarray(cycles, dtype=float)
    return np.exp(2j * np.pi * np.mod(cycles, 1.0))


def _check_selection(selection: SubcarrierSelection, cfg: SystemConfig):
    if selection.n_subcarriers != cfg.n_subcarriers:
        raise ValueError("selection was drawn for a different grid size")


def _range_cycles(selection, R, cfg):
    # eta(n) df R / c, shape (..., N_T)
    R = np.asarray(R, dtype=float)[..., None]
    return selection.eta * (cfg.delta_f / cfg.c) * R


def _angle_cycles(selection, theta, cfg):
    # -n d cos(theta) (f_c + eta(n) df) / c, shape (..., N_T)
    cos_t = np.cos(np.asarray(theta, dtype=float))[..., None]
    n = np.arange(selection.n_antennas)
    freq = cfg.carrier_hz + selection.eta * cfg.delta_f
    return -(n * cfg.d) * cos_t * freq / cfg.c


def psi_vector(selection: SubcarrierSelection, theta, R, cfg: SystemConfig):
    """psi_n for every antenna, broadcasting over ``theta`` and ``R``."""
    _check_selection(selection, cfg)
    return _range_cycles(selection, R, cfg) + _angle_cycles(selection, theta, cfg)


def psi(n: int, selection: SubcarrierSelection, pos: Position,
        cfg: SystemConfig) -> float:
    """Phase (in cycles) of antenna ``n``, numbered 1..N_T as in the model."""
    if not 1 <= n <= selection.n_antennas:
        raise IndexError(f"antenna index {n} outside 1..{selection.n_antennas}")
    k = n - 1
    cos_t = np.cos(pos.theta)
    r_n = pos.R - k * cfg.d * cos_t
    return (selection.indices[k] * cfg.delta_f * r_n / cfg.c
            - cfg.carrier_hz * k * cfg.d * cos_t / cfg.c)


def range_phasors(selection: SubcarrierSelection, R, cfg: SystemConfig):
    """Range-only factor of ``a``: exp(j 2 pi eta(n) df R / c)."""
    _check_selection(selection, cfg)
    return cycles_to_phasor(_range_cycles(selection, R, cfg))


def angle_phasors(selection: SubcarrierSelection, theta, cfg: SystemConfig):
    """Angle-only factor of ``a``; ``a = range_phasors * angle_phasors``."""
    _check_selection(selection, cfg)
    return cycles_to_phasor(_angle_cycles(selection, theta, cfg))


def steering_matrix(selection: SubcarrierSelection, theta, R, cfg: SystemConfig):
    """Stack of steering vectors ``a`` with shape broadcast(theta, R) + (N_T,)."""
    return range_phasors(selection, R, cfg) * angle_phasors(selection, theta, cfg)


@dataclass(frozen=True)
class SteeringVector:
    elements: np.ndarray = field(repr=False)
    position: Position
    selection: SubcarrierSelection

    @property
    def h(self) -> np.ndarray:
        """Elements of a^H, i.e. exp(-j 2 pi psi_n)."""
        return np.conj(self.elements)

    def __len__(self):
        return len(self.elements)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.elements, dtype=dtype)


def steering_vector(pos: Position, selection: SubcarrierSelection,
                    cfg: SystemConfig) -> SteeringVector:
    a = steering_matrix(selection, pos.theta, pos.R, cfg)
    a.setflags(write=False)
    return SteeringVector(a, pos, selection)


def correlation(pos_a: Position, pos_b: Position, selection: SubcarrierSelection,
                cfg: SystemConfig, exact: bool = False) -> complex:
    """Inner product a^H(pos_a) a(pos_b) = sum_n exp(-j 2 pi dtheta_n).

    By default uses the narrowband phase difference

        dtheta_n = eta(n) df (R_a - R_b) / c - k (cos theta_a - cos theta_b) n

    with k = f_c d / c (exactly 1/2 at half-wavelength spacing), which drops
    the eta(n) df * n d cos(theta) / c cross term (of relative size B / f_c).
    ``exact=True`` evaluates the inner product of the full steering vectors.
    """
    if isinstance(selection, (tuple, list)):
        sel_a, sel_b = selection
        if sel_a.n_antennas != sel_b.n_antennas:
            raise ValueError("selections have different lengths")
        if sel_a != sel_b:
            raise ValueError("both positions must use the same selection")
        selection = sel_a
    _check_selection(selection, cfg)
    if exact:
        a_a = steering_matrix(selection, pos_a.theta, pos_a.R, cfg)
        a_b = steering_matrix(selection, pos_b.theta, pos_b.R, cfg)
        return complex(np.vdot(a_a, a_b))
    n = np.arange(selection.n_antennas)
    dtheta = (selection.eta * cfg.delta_f * (pos_a.R - pos_b.R) / cfg.c
              - cfg.spacing_factor * (np.cos(pos_a.theta) - np.cos(pos_b.theta)) * n)
    return complex(np.sum(cycles_to_phasor(-dtheta)))
