"""
Analytical results: the approximate real-time SINR distribution, first-null
and first-sidelobe geometry of the SINR peak, the eavesdropper SINR bound
and the average secrecy rate (closed form and grid search).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import Position, SystemConfig, derive_rng, path_loss
from .rscs import SubcarrierSelection, draw_selection
from .sinr import correlation_grid, sinr_eavesdropper_lambda, sinr_from_correlation
from .steering import cycles_to_phasor

__all__ = [
    "SinrDistributionParams", "sinr_pdf", "sinr_cdf", "sinr_mean",
    "sample_realtime_sinr", "sample_self_consistent", "kolmogorov_distance",
    "NullSidelobeGeometry", "first_nulls", "sidelobe_peaks", "lambda_max",
    "lambda_max1_expected", "eavesdropper_sinr_bound", "SecrecyRateReport",
    "secrecy_rate_theoretical", "secrecy_rate_numerical", "wiretap_grid",
    "wiretap_mask", "wiretap_max_sinr", "REPORT_COLUMNS", "reports_to_csv",
]


# -- real-time SINR distribution -------------------------------------------

@dataclass(frozen=True)
class SinrDistributionParams:
    """Half-variances of the useful signal (e), AN (a) and channel noise (b)."""

    e: float
    a: float
    b: float

    def __post_init__(self):
        if self.e < 0 or self.a < 0 or self.b < 0:
            raise ValueError("e, a and b must be nonnegative")

    @property
    def scale(self) -> float:
        """(a + b) / e."""
        if self.e <= 0:
            raise ValueError("e must be positive")
        return (self.a + self.b) / self.e


def sinr_pdf(x, params: SinrDistributionParams):
    """f(x) = (2 (a+b) / e) (1 + (a+b) x / e)^-3 for x > 0."""
    k = params.scale
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, 2.0 * k / (1.0 + k * np.maximum(x, 0.0)) ** 3, 0.0)
    return out if out.ndim else float(out)


def sinr_cdf(x, params: SinrDistributionParams):
    k = params.scale
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = 1.0 - (1.0 + k * x) ** -2
    return out if out.ndim else float(out)


def sinr_mean(params: SinrDistributionParams) -> float:
    """e / (a + b)."""
    if params.a + params.b == 0:
        raise ValueError("a + b must be positive")
    return params.e / (params.a + params.b)


def sample_realtime_sinr(params: SinrDistributionParams, n: int, seed) -> np.ndarray:
    """gamma = e alpha / (a beta + b lambda) with alpha, beta, lambda iid chi2(2).

    This is the raw construction, before any distributional approximation.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = derive_rng(seed)
    alpha, beta, lam = rng.chisquare(2, size=(3, n))
    return params.e * alpha / (params.a * beta + params.b * lam)


def sample_self_consistent(params: SinrDistributionParams, n: int, seed) -> np.ndarray:
    """gamma = e / (2 (a+b)) * (alpha / 2) / (q / 4), alpha ~ chi2(2), q ~ chi2(4).

    The F(2, 4) variable has density (1 + x/2)^-3, so these samples follow
    ``sinr_pdf`` exactly.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = derive_rng(seed)
    alpha = rng.chisquare(2, size=n)
    q = rng.chisquare(4, size=n)
    f = (alpha / 2.0) / (q / 4.0)
    return params.e / (2.0 * (params.a + params.b)) * f


def kolmogorov_distance(samples, params: SinrDistributionParams) -> float:
    """sup |F_empirical - F| against ``sinr_cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    F = sinr_cdf(x, params)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


# -- null / sidelobe geometry ----------------------------------------------

@dataclass(frozen=True)
class NullSidelobeGeometry:
    """Angles in radians (``None`` where arccos is undefined), ranges in m.

    Branch order is (minus, plus): arccos(cos theta_D - k/N_T) then
    arccos(cos theta_D + k/N_T), and R_D - offset then R_D + offset.
    """

    theta: Tuple[Optional[float], Optional[float]]
    range: Tuple[float, float]
    delta_theta: Optional[float]
    delta_R: float

    @property
    def theta_deg(self):
        return tuple(None if t is None else math.degrees(t) for t in self.theta)

    @property
    def delta_theta_deg(self):
        return None if self.delta_theta is None else math.degrees(self.delta_theta)


def _arccos_branches(cos_d: float, offset: float):
    out = []
    for c in (cos_d - offset, cos_d + offset):
        out.append(math.acos(c) if abs(c) <= 1.0 else None)
    return tuple(out)


def _geometry(desired: Position, cfg: SystemConfig, angle_k: float, range_k: float):
    # nulls/sidelobes sit where k/N_T cycles of cos-offset accrue across the
    # aperture; for non-half-wavelength spacing the offset scales by 1/(2 f_c d / c)
    cos_offset = angle_k / cfg.n_antennas / (2.0 * cfg.spacing_factor)
    thetas = _arccos_branches(math.cos(desired.theta), cos_offset)
    dR = range_k * cfg.c / cfg.bandwidth_hz
    deltas = [abs(t - desired.theta) for t in thetas if t is not None]
    return NullSidelobeGeometry(
        theta=thetas,
        range=(desired.R - dR, desired.R + dR),
        delta_theta=min(deltas) if deltas else None,
        delta_R=dR,
    )


def first_nulls(desired: Position, cfg: SystemConfig) -> NullSidelobeGeometry:
    """theta = arccos(cos theta_D -/+ 2/N_T), R = R_D -/+ c/B (first harmonic)."""
    return _geometry(desired, cfg, 2.0, 1.0)


def sidelobe_peaks(desired: Position, cfg: SystemConfig) -> NullSidelobeGeometry:
    """theta = arccos(cos theta_D -/+ 3/N_T), R = R_D -/+ 3c/(2B)."""
    return _geometry(desired, cfg, 3.0, 1.5)


def _lambda_from_cycles(cycles) -> float:
    s = np.mean(cycles_to_phasor(cycles))
    return float(min(max(abs(s) ** 2, 0.0), 1.0))


def lambda_max(desired: Position, selection: SubcarrierSelection,
               cfg: SystemConfig) -> Tuple[float, float]:
    """(lambda_max1, lambda_max2): normalized correlation at the first range
    sidelobe (using the selection's actual subcarriers) and at the first angle
    sidelobe (a pure geometric sum, independent of the selection)."""
    n_t = selection.n_antennas
    dR = 1.5 * cfg.c / cfg.bandwidth_hz
    lam1 = _lambda_from_cycles(selection.eta * cfg.delta_f * dR / cfg.c)
    # spacing_factor * (cos_sidelobe - cos_D) = 3 / (2 N_T) by construction
    lam2 = _lambda_from_cycles(1.5 / n_t * np.arange(n_t))
    return lam1, lam2


def lambda_max1_expected(desired: Position, cfg: SystemConfig, n_draws: int = 1000,
                         seed: int = 0) -> float:
    """Average of lambda_max1 over random selections."""
    vals = [lambda_max(desired, draw_selection(cfg, derive_rng(seed, i)), cfg)[0]
            for i in range(n_draws)]
    return float(np.mean(vals))


def eavesdropper_sinr_bound(desired: Position, selection: SubcarrierSelection,
                            cfg: SystemConfig) -> float:
    """max{SINR(lambda_max1), SINR(lambda_max2)}."""
    lam1, lam2 = lambda_max(desired, selection, cfg)
    return float(max(sinr_eavesdropper_lambda(lam1, cfg),
                     sinr_eavesdropper_lambda(lam2, cfg)))


# -- secrecy rate -------------------------------------------------------------

REPORT_COLUMNS = ("snr_db", "beta1_sq", "n_antennas", "bandwidth_hz",
                  "sr_theoretical", "sr_numerical", "lambda_max1", "lambda_max2",
                  "delta_theta_deg", "delta_r_m")


@dataclass(frozen=True)
class SecrecyRateReport:
    sr_theoretical: float
    sr_numerical: Optional[float]
    lambda_max1: float
    lambda_max2: float
    delta_theta: Optional[float]          # radians
    delta_R: float
    sinr_desired: float
    sinr_eve_bound: float
    sinr_eve_numerical: Optional[float] = None
    snr_db: float = float("nan")
    beta1_sq: float = float("nan")
    n_antennas: int = 0
    bandwidth_hz: float = float("nan")

    @property
    def wiretap_definition(self):
        return (self.delta_theta, self.delta_R)

    def row(self) -> dict:
        return {
            "snr_db": self.snr_db, "beta1_sq": self.beta1_sq,
            "n_antennas": self.n_antennas, "bandwidth_hz": self.bandwidth_hz,
            "sr_theoretical": self.sr_theoretical,
            "sr_numerical": self.sr_numerical,
            "lambda_max1": self.lambda_max1, "lambda_max2": self.lambda_max2,
            "delta_theta_deg": (None if self.delta_theta is None
                                else math.degrees(self.delta_theta)),
            "delta_r_m": self.delta_R,
        }


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def reports_to_csv(reports: Sequence[SecrecyRateReport], header: str = "") -> str:
    buf = io.StringIO()
    if header:
        buf.write(header if header.endswith("\n") else header + "\n")
    buf.write(",".join(REPORT_COLUMNS) + "\n")
    for rep in reports:
        row = rep.row()
        buf.write(",".join(_fmt(row[c]) for c in REPORT_COLUMNS) + "\n")
    return buf.getvalue()


def _desired_sinr(cfg: SystemConfig) -> float:
    # rho = 1 at the desired range under either path-loss policy
    return cfg.power_watts * cfg.beta1_sq / cfg.noise_variance


def _secrecy(sinr_d: float, sinr_e: float) -> float:
    return max(math.log2(1.0 + sinr_d) - math.log2(1.0 + sinr_e), 0.0)


def _report_meta(cfg: SystemConfig) -> dict:
    return dict(snr_db=cfg.snr_db, beta1_sq=cfg.beta1_sq, n_antennas=cfg.n_antennas,
                bandwidth_hz=cfg.bandwidth_hz)


def secrecy_rate_theoretical(desired: Position, selection: SubcarrierSelection,
                             cfg: SystemConfig) -> SecrecyRateReport:
    """log2(1 + SINR_D) - log2(1 + max{SINR(lambda_max1), SINR(lambda_max2)}),
    clamped at zero."""
    lam1, lam2 = lambda_max(desired, selection, cfg)
    bound = eavesdropper_sinr_bound(desired, selection, cfg)
    sinr_d = _desired_sinr(cfg)
    geo = first_nulls(desired, cfg)
    return SecrecyRateReport(
        sr_theoretical=_secrecy(sinr_d, bound), sr_numerical=None,
        lambda_max1=lam1, lambda_max2=lam2, delta_theta=geo.delta_theta,
        delta_R=geo.delta_R, sinr_desired=sinr_d, sinr_eve_bound=bound,
        **_report_meta(cfg))


def wiretap_grid(desired: Position, cfg: SystemConfig, theta_step_deg: Optional[float] = None,
                 range_step_m: Optional[float] = None, span: float = 10.0):
    """Search grid (theta in degrees, range in m) for the wiretap maximum.

    theta step min(0.25 deg, delta_theta / 8) over [0, 180] deg; range step
    min(delta_R / 10, 2 m) over R_D +/- span * delta_R (positive ranges only).
    """
    geo = first_nulls(desired, cfg)
    if theta_step_deg is None:
        dtheta = geo.delta_theta_deg if geo.delta_theta is not None else 1.0
        theta_step_deg = min(0.25, dtheta / 8.0)
    if range_step_m is None:
        range_step_m = min(geo.delta_R / 10.0, 2.0)
    n_theta = int(round(180.0 / theta_step_deg))
    theta = np.linspace(0.0, 180.0, n_theta + 1)
    lo = desired.R - span * geo.delta_R
    hi = desired.R + span * geo.delta_R
    n_r = int(math.ceil((hi - lo) / range_step_m))
    rng_ = np.linspace(lo, hi, n_r + 1)
    rng_ = rng_[rng_ > 0]
    return theta, rng_


def wiretap_mask(desired: Position, cfg: SystemConfig, theta_deg, range_m) -> np.ndarray:
    """Grid points with |theta - theta_D| >= d_theta and |R - R_D| >= d_R."""
    geo = first_nulls(desired, cfg)
    # tolerance keeps grid points that sit exactly on a first null
    tol = 1e-9
    dth = np.abs(np.radians(np.asarray(theta_deg, float)) - desired.theta)
    dr = np.abs(np.asarray(range_m, float) - desired.R)
    if geo.delta_theta is None:
        ok_theta = np.zeros_like(dth, dtype=bool)
    else:
        ok_theta = dth >= geo.delta_theta - tol
    ok_range = dr >= geo.delta_R * (1 - tol)
    return ok_theta[:, None] & ok_range[None, :]


def wiretap_max_sinr(desired: Position, selection: SubcarrierSelection,
                     cfgs: Sequence[SystemConfig], grid=None,
                     receiver_mode: str = "active-only"):
    """Maximum closed-form SINR over the wiretap region for several configs
    that share the array geometry (only power, noise or power split differ).

    Returns (max_sinr per config, (theta_deg, range_m) argmax per config).
    """
    base = cfgs[0]
    theta_deg, range_m = wiretap_grid(desired, base) if grid is None else grid
    mask = wiretap_mask(desired, base, theta_deg, range_m)
    if not mask.any():
        raise ValueError("wiretap region is empty on this grid")
    corr = correlation_grid(desired, selection, base, np.radians(theta_deg), range_m)
    out, where = [], []
    for cfg in cfgs:
        rho = 1.0 if cfg.rho_policy == "unit" else path_loss(cfg, range_m, desired.R)[None, :]
        s = sinr_from_correlation(corr, cfg, receiver_mode, rho)
        s = np.where(mask, s, -np.inf)
        i, j = np.unravel_index(np.argmax(s), s.shape)
        out.append(float(s[i, j]))
        where.append((float(theta_deg[i]), float(range_m[j])))
    return out, where


def secrecy_rate_numerical(desired: Position, selection: SubcarrierSelection,
                           cfg: SystemConfig, grid=None) -> SecrecyRateReport:
    """Secrecy rate with the eavesdropper SINR maximized over the wiretap grid."""
    theory = secrecy_rate_theoretical(desired, selection, cfg)
    (sinr_e,), _ = wiretap_max_sinr(desired, selection, [cfg], grid)
    return SecrecyRateReport(
        sr_theoretical=theory.sr_theoretical,
        sr_numerical=_secrecy(theory.sinr_desired, sinr_e),
        lambda_max1=theory.lambda_max1, lambda_max2=theory.lambda_max2,
        delta_theta=theory.delta_theta, delta_R=theory.delta_R,
        sinr_desired=theory.sinr_desired, sinr_eve_bound=theory.sinr_eve_bound,
        sinr_eve_numerical=sinr_e, **_report_meta(cfg))
