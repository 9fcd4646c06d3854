"""
System configuration, positions and unit helpers shared by every module.

Angles are radians internally; degrees only appear at the CLI and in CSV
output. Powers are linear unless a name ends in ``_db``.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

__all__ = [
    "C_LIGHT", "ConfigError", "SystemConfig", "Position", "validate_config",
    "delta_f", "path_loss", "load_config", "config_to_dict", "db2lin",
    "lin2db", "CONFIG_KEYS", "derive_rng", "seed_sequence",
]

C_LIGHT = 3.0e8

RHO_POLICIES = ("unit", "inverse-square")

# keys accepted in a configuration file, in canonical order
CONFIG_KEYS = (
    "carrier_hz", "bandwidth_hz", "n_subcarriers", "n_antennas",
    "element_spacing_m", "power_watts", "noise_variance", "beta1_sq",
    "beta2_sq", "rho_policy", "seed",
)


class ConfigError(ValueError):
    """Raised when a configuration violates one of its invariants.

    The ``invariant`` attribute names the violated constraint so callers
    (notably the CLI) can report it without parsing the message.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant} violated: {message}")
        self.invariant = invariant


def db2lin(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def lin2db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SystemConfig:
    """Array, OFDM grid and power parameters.

    Parameters
    ----------
    carrier_hz : float
        Reference (carrier) frequency f_c.
    bandwidth_hz : float
        Total bandwidth B = N * delta_f.
    n_subcarriers : int
        OFDM grid size N.
    n_antennas : int
        Number of transmit elements N_T (one active subcarrier each).
    element_spacing_m : float, optional
        Element spacing d. ``None`` means half a carrier wavelength.
    power_watts : float
        Total transmit power P_S.
    noise_variance : float
        Per-subchannel noise variance sigma_n^2.
    beta1, beta2 : float
        Amplitude split between confidential message and artificial noise.
    rho_policy : {"unit", "inverse-square"}
        Path-loss model.
    c : float
        Propagation speed.
    require_pow2 : bool
        Enforce a power-of-two grid size.
    seed : int
        Master seed for anything random.
    """

    carrier_hz: float = 3.0e9
    bandwidth_hz: float = 5.0e6
    n_subcarriers: int = 1024
    n_antennas: int = 8
    element_spacing_m: Optional[float] = None
    power_watts: float = 10.0
    noise_variance: float = 1.0
    beta1: float = math.sqrt(0.5)
    beta2: float = math.sqrt(0.5)
    rho_policy: str = "unit"
    c: float = C_LIGHT
    require_pow2: bool = True
    seed: int = 0

    # -- derived quantities -------------------------------------------------
    @property
    def d(self) -> float:
        if self.element_spacing_m is None:
            return self.c / (2.0 * self.carrier_hz)
        return float(self.element_spacing_m)

    @property
    def delta_f(self) -> float:
        return self.bandwidth_hz / self.n_subcarriers

    @property
    def symbol_period(self) -> float:
        return self.n_subcarriers / self.bandwidth_hz

    @property
    def sample_interval(self) -> float:
        return 1.0 / self.bandwidth_hz

    @property
    def beta1_sq(self) -> float:
        return self.beta1 ** 2

    @property
    def beta2_sq(self) -> float:
        return self.beta2 ** 2

    @property
    def snr(self) -> float:
        return self.power_watts / self.noise_variance

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.snr)

    @property
    def half_wavelength_spacing(self) -> bool:
        return self.d == self.c / (2.0 * self.carrier_hz)

    @property
    def spacing_factor(self) -> float:
        """f_c * d / c, exactly 1/2 for half-wavelength spacing."""
        if self.half_wavelength_spacing:
            return 0.5
        return self.carrier_hz * self.d / self.c

    @property
    def aperture(self) -> float:
        return (self.n_antennas - 1) * self.d

    # -- convenience constructors ------------------------------------------
    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def with_beta1_sq(self, beta1_sq: float) -> "SystemConfig":
        beta1_sq = float(beta1_sq)
        return self.replace(beta1=math.sqrt(beta1_sq),
                            beta2=math.sqrt(max(1.0 - beta1_sq, 0.0)))

    def with_snr_db(self, snr_db: float) -> "SystemConfig":
        """Keep the noise variance and rescale the transmit power."""
        return self.replace(
            power_watts=self.noise_variance * 10.0 ** (float(snr_db) / 10.0))


@dataclass(frozen=True)
class Position:
    """Receiver location relative to the first array element.

    ``theta`` is in radians and must lie strictly inside (0, pi) so that
    cos(theta) is injective; ``R`` is the range in metres.
    """

    theta: float
    R: float

    def __post_init__(self):
        if not (0.0 < self.theta < math.pi):
            raise ValueError(
                f"theta must lie in the open interval (0, pi), got {self.theta!r}")
        if not self.R > 0.0:
            raise ValueError(f"range must be positive, got {self.R!r}")

    @classmethod
    def from_degrees(cls, theta_deg: float, R: float) -> "Position":
        return cls(math.radians(theta_deg), float(R))

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    def check_far_field(self, cfg: SystemConfig) -> "Position":
        if not self.R > cfg.aperture:
            raise ValueError(
                f"range {self.R} m is inside the array aperture "
                f"{cfg.aperture} m (far-field model does not apply)")
        return self


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Check every configuration invariant and return a normalized copy.

    The returned config has ``element_spacing_m`` resolved to a number, so
    validating a validated config returns an equal value.

    Raises
    ------
    ConfigError
        On the first violated invariant.
    """
    for name in ("carrier_hz", "bandwidth_hz", "power_watts",
                 "noise_variance", "c"):
        value = getattr(cfg, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value)
                and value > 0):
            raise ConfigError(name, f"must be a positive finite number, got {value!r}")
    if int(cfg.n_subcarriers) != cfg.n_subcarriers or cfg.n_subcarriers < 1:
        raise ConfigError("n_subcarriers", "must be a positive integer")
    if int(cfg.n_antennas) != cfg.n_antennas or cfg.n_antennas < 1:
        raise ConfigError("n_antennas", "must be a positive integer")
    if cfg.n_antennas > cfg.n_subcarriers:
        raise ConfigError(
            "N_T <= N",
            f"n_antennas={cfg.n_antennas} exceeds n_subcarriers={cfg.n_subcarriers}")
    if cfg.require_pow2 and not _is_pow2(int(cfg.n_subcarriers)):
        raise ConfigError(
            "power-of-two grid",
            f"n_subcarriers={cfg.n_subcarriers} is not a power of two")
    if cfg.beta1 < 0 or cfg.beta2 < 0:
        raise ConfigError("power-allocation constraint",
                          "beta1 and beta2 must be nonnegative")
    total = cfg.beta1 ** 2 + cfg.beta2 ** 2
    if abs(total - 1.0) > 1e-12:
        # the source writes "beta1^2 + beta1^2 = 1"; read as beta1^2 + beta2^2 = 1
        raise ConfigError(
            "power-allocation constraint",
            f"beta1^2 + beta2^2 = {total!r}, expected 1 "
            "(read as beta1^2 + beta2^2 = 1)")
    if cfg.rho_policy not in RHO_POLICIES:
        raise ConfigError("rho_policy",
                          f"{cfg.rho_policy!r} not in {RHO_POLICIES}")
    if not cfg.bandwidth_hz < cfg.carrier_hz / 10.0:
        raise ConfigError(
            "narrowband (N*delta_f << f_c)",
            f"bandwidth {cfg.bandwidth_hz} Hz must be below f_c/10 = "
            f"{cfg.carrier_hz / 10.0} Hz")
    d = cfg.d
    if not (math.isfinite(d) and d > 0):
        raise ConfigError("element_spacing_m", f"must be positive, got {d!r}")
    return cfg.replace(n_subcarriers=int(cfg.n_subcarriers),
                       n_antennas=int(cfg.n_antennas),
                       element_spacing_m=float(d))


def delta_f(cfg: SystemConfig) -> float:
    """Subcarrier spacing B / N in Hz."""
    return cfg.bandwidth_hz / cfg.n_subcarriers


def path_loss(cfg: SystemConfig, R, R_ref: Optional[float] = None):
    """Path-loss amplitude factor rho at range ``R``.

    ``unit`` gives 1 everywhere. ``inverse-square`` gives (R_ref / R)^2 so
    that rho is 1 at the reference (desired) range.
    """
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("range must be positive for path loss")
    if cfg.rho_policy == "unit":
        out = np.ones_like(R)
    elif cfg.rho_policy == "inverse-square":
        if R_ref is None:
            raise ValueError("inverse-square path loss needs a reference range")
        out = (float(R_ref) / R) ** 2
    else:
        raise ConfigError("rho_policy", repr(cfg.rho_policy))
    return out if out.ndim else float(out)


# -- configuration files ----------------------------------------------------

_INT_KEYS = {"n_subcarriers", "n_antennas", "seed"}
_STR_KEYS = {"rho_policy"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw.strip("\"'")
    if key in _INT_KEYS:
        value = float(raw)
        if value != int(value):
            raise ConfigError(key, f"expected an integer, got {raw!r}")
        return int(value)
    return float(raw)


def config_from_mapping(values: dict, base: Optional[SystemConfig] = None) -> SystemConfig:
    """Build a config from file-style keys (``beta1_sq`` etc.)."""
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError("config keys", f"unknown key(s): {sorted(unknown)}")
    cfg = base or SystemConfig()
    changes = {}
    for key in ("carrier_hz", "bandwidth_hz", "n_subcarriers", "n_antennas",
                "element_spacing_m", "power_watts", "noise_variance",
                "rho_policy", "seed"):
        if key in values and values[key] is not None:
            changes[key] = values[key]
    if "beta1_sq" in values or "beta2_sq" in values:
        b1 = values.get("beta1_sq")
        b2 = values.get("beta2_sq")
        if b1 is None:
            b1 = 1.0 - b2
        if b2 is None:
            b2 = 1.0 - b1
        if b1 < 0 or b2 < 0:
            raise ConfigError("power-allocation constraint",
                              "beta1_sq and beta2_sq must be nonnegative")
        changes["beta1"] = math.sqrt(b1)
        changes["beta2"] = math.sqrt(b2)
    return cfg.replace(**changes)


def load_config(path: Union[str, Path]) -> SystemConfig:
    """Read a ``key = value`` configuration file.

    Lines starting with ``#`` or ``;`` are comments. Every key in
    ``CONFIG_KEYS`` except ``element_spacing_m`` is required.
    """
    path = Path(path)
    text = path.read_text()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("[config]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError("config syntax", f"{path}: {exc}") from exc
    section = parser["config"]
    values = {}
    for key, raw in section.items():
        if key not in CONFIG_KEYS:
            raise ConfigError("config keys", f"{path}: unknown key {key!r}")
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(key, f"{path}: cannot parse {raw!r}") from exc
    missing = [k for k in CONFIG_KEYS if k != "element_spacing_m" and k not in values]
    if missing:
        raise ConfigError("config keys", f"{path}: missing key(s) {missing}")
    return config_from_mapping(values)


def config_to_dict(cfg: SystemConfig) -> dict:
    """File-style view of a config (used for CSV provenance headers)."""
    return {
        "carrier_hz": cfg.carrier_hz,
        "bandwidth_hz": cfg.bandwidth_hz,
        "n_subcarriers": cfg.n_subcarriers,
        "n_antennas": cfg.n_antennas,
        "element_spacing_m": cfg.d,
        "power_watts": cfg.power_watts,
        "noise_variance": cfg.noise_variance,
        "beta1_sq": cfg.beta1_sq,
        "beta2_sq": cfg.beta2_sq,
        "rho_policy": cfg.rho_policy,
        "seed": cfg.seed,
    }


def format_config(cfg: SystemConfig) -> str:
    return "\n".join(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}"
                     for k, v in config_to_dict(cfg).items())


def seed_sequence(seed, *counters: int) -> np.random.SeedSequence:
    """Counter-based seed derivation: the stream for (seed, i, j, ...) does
    not depend on how many other streams were drawn or in which order."""
    if isinstance(seed, np.random.SeedSequence):
        if not counters:
            return seed
        return np.random.SeedSequence(seed.entropy,
                                      spawn_key=tuple(seed.spawn_key) + tuple(counters))
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(c) for c in counters))


def derive_rng(seed, *counters: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *counters))
