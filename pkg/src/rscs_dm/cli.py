"""
Command-line front end.

Parameter precedence: built-in defaults < ``--config`` file < flags.
``--snr-db`` is applied after ``--noise-variance`` and sets the transmit
power. Exit status: 0 success, 1 configuration/argument error (or a failed
``validate`` check), 2 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .analysis import SinrDistributionParams
from .core import (ConfigError, Position, SystemConfig, config_from_mapping, load_config,
                   seed_sequence, validate_config)
from .precoder import draw_an, null_space_projector, phase_alignment
from .rscs import draw_selection, schedule, selection_to_csv, uniform_selection
from .simkit import (ExperimentSpec, sinr_distribution_report, provenance_header, run_fig3_fig4,
                     run_fig5, run_fig6, run_fig7, validate_sinr_distribution)
from .sinr import sinr_map
from .validation import checks_to_csv, format_table, run_checks
from .waveform import dft, series_to_csv, synthesize, synthesize_received

EXIT_CONFIG = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


def _float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("configuration")
    g.add_argument("--config", type=Path, help="key = value configuration file")
    g.add_argument("--out", type=Path, default=Path("."), help="output directory")
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("--carrier-hz", type=float)
    g.add_argument("--bandwidth-hz", type=float)
    g.add_argument("--n-subcarriers", type=int)
    g.add_argument("--ntx", "--n-antennas", dest="n_antennas", type=int)
    g.add_argument("--element-spacing-m", type=float)
    g.add_argument("--power-watts", type=float)
    g.add_argument("--noise-variance", type=float)
    g.add_argument("--snr-db", type=float, help="sets power = noise * 10^(snr/10)")
    g.add_argument("--beta1-sq", type=float)
    g.add_argument("--beta2-sq", type=float)
    g.add_argument("--rho-policy", choices=("unit", "inverse-square"))
    g.add_argument("--theta-deg", type=float, default=60.0, help="desired angle")
    g.add_argument("--range-m", type=float, default=500.0, help="desired range")


def build_config(args) -> SystemConfig:
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError("readable config file", f"cannot read {args.config}")
        cfg = load_config(args.config)
    else:
        cfg = SystemConfig()
    flags = {k: getattr(args, k) for k in (
        "carrier_hz", "bandwidth_hz", "n_subcarriers", "n_antennas",
        "element_spacing_m", "power_watts", "noise_variance", "rho_policy", "seed")}
    flags = {k: v for k, v in flags.items() if v is not None}
    if args.beta1_sq is not None or args.beta2_sq is not None:
        flags["beta1_sq"] = args.beta1_sq
        flags["beta2_sq"] = args.beta2_sq
    cfg = config_from_mapping(flags, base=cfg)
    if args.snr_db is not None:
        cfg = cfg.with_snr_db(args.snr_db)
    return validate_config(cfg)


def _desired(args) -> Position:
    try:
        return Position.from_degrees(args.theta_deg, args.range_m)
    except ValueError as exc:
        raise ConfigError("desired position", str(exc)) from exc


def _out_dir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _selection(args, cfg):
    if getattr(args, "uniform", False):
        return uniform_selection(cfg)
    return draw_selection(cfg, seed_sequence(cfg.seed, 0))


# -- subcommands -------------------------------------------------------------

def cmd_sinr_map(args) -> int:
    cfg = build_config(args)
    desired = _desired(args)
    theta = np.round(np.arange(args.theta_min, args.theta_max + 1e-9, args.theta_step), 10)
    rng_ = np.round(np.arange(args.range_min, args.range_max + 1e-9, args.range_step), 10)
    if args.figure:
        sweep = {"fig3": "bandwidth_hz", "fig4": "n_antennas", "fig5": "beta1_sq"}[args.figure]
        defaults = {"fig3": [5e6, 20e6, 100e6], "fig4": [8, 32, 128], "fig5": [0.1, 0.5, 0.9]}
        values = args.values or defaults[args.figure]
        spec = ExperimentSpec(cfg, sweep, tuple(values), 1, cfg.seed, desired)
        out = _out_dir(args)
        runner = run_fig5 if args.figure == "fig5" else run_fig3_fig4
        for res in runner(spec, out, theta, rng_):
            print(f"{sweep}={res.value:g} peak: {res.peak_theta_deg:.1f} deg, "
                  f"{res.peak_range_m:.1f} m, sinr {res.peak_sinr:.4g}; -3 dB widths: "
                  f"{res.width_theta_deg:.4g} deg, {res.width_range_m:.4g} m")
        return 0
    if cfg.rho_policy == "inverse-square":
        rng_ = rng_[rng_ > 0]
    selection = _selection(args, cfg)
    smap = sinr_map(desired, selection, cfg, theta, rng_, args.receiver_mode)
    header = provenance_header(cfg, theta_d_deg=desired.theta_deg, range_d_m=desired.R,
                               receiver_mode=args.receiver_mode,
                               selection=" ".join(map(str, selection.indices)))
    path = _out_dir(args) / args.output
    path.write_text(smap.to_csv(header))
    t, r, v = smap.peak()
    print(f"peak: {t:.1f} deg, {r:.1f} m (sinr {v:.6g}, {10 * math.log10(v):.3f} dB)")
    print(f"wrote {path}")
    return 0


def cmd_secrecy_rate(args) -> int:
    if args.trials < 1:
        raise ConfigError("trials", f"must be at least 1, got {args.trials}")
    cfg = build_config(args)
    desired = _desired(args)
    out = _out_dir(args)
    if args.sweep == "snr":
        values = args.values or [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
        spec = ExperimentSpec(cfg, "snr_db", tuple(values), args.trials, cfg.seed, desired)
        res = run_fig6(spec, out, args.theory_only)
    else:
        values = args.values or [round(0.05 * i, 2) for i in range(1, 20)]
        spec = ExperimentSpec(cfg, "beta1_sq", tuple(values), args.trials, cfg.seed, desired)
        res = run_fig7(spec, out, args.theory_only)
        print(f"argmax beta1_sq: {res.argmax:g}")
    for p in res.points:
        print(f"x={p.x:g} theory={p.y_theory:.6g} empirical={p.y_empirical:.6g} "
              f"stderr={p.y_stderr:.3g}")
    print(f"wrote {res.path}")
    return 0


def cmd_validate(args) -> int:
    cfg = build_config(args)
    desired = _desired(args)
    checks = run_checks(cfg, desired, cfg.seed, quick=args.quick)
    table = format_table(checks)
    print(table)
    path = _out_dir(args) / "validation.csv"
    path.write_text(checks_to_csv(checks, provenance_header(
        cfg, theta_d_deg=desired.theta_deg, range_d_m=desired.R, quick=args.quick)))
    if args.distribution_report:
        rep = validate_sinr_distribution(SinrDistributionParams(2.0, 1.0, 1.0), 100_000, cfg.seed)
        (args.out / "sinr_distribution.json").write_text(sinr_distribution_report(rep) + "\n")
    failed = [c for c in checks if c.asserted and not c.passed]
    print(f"{len(failed)} asserted check(s) failed" if failed else "all asserted checks PASS")
    return 1 if failed else 0


def cmd_selection_dump(args) -> int:
    cfg = build_config(args)
    out = _out_dir(args)
    if args.uniform:
        path = out / "selection_uniform.csv"
        path.write_text(selection_to_csv(uniform_selection(cfg), provenance_header(cfg)))
        print(f"wrote {path}")
        return 0
    sched = schedule(cfg, args.mode, args.block_len, args.n_symbols, cfg.seed)
    for b in range(sched.n_blocks):
        path = out / f"selection_block{b:04d}.csv"
        header = provenance_header(cfg, mode=args.mode, block_len=sched.block_len,
                                   n_symbols=args.n_symbols, block=b)
        path.write_text(selection_to_csv(sched.selection_for_block(b), header))
    print(f"wrote {sched.n_blocks} selection file(s) to {out}")
    return 0


def cmd_waveform_dump(args) -> int:
    cfg = build_config(args)
    desired = _desired(args)
    pos = desired if args.at_theta_deg is None else Position.from_degrees(
        args.at_theta_deg, args.at_range_m if args.at_range_m is not None else desired.R)
    selection = _selection(args, cfg)
    bf = phase_alignment(desired, selection, cfg)
    rng = np.random.default_rng(seed_sequence(cfg.seed, 1))
    if args.codeword:
        proj = null_space_projector(desired, selection, cfg)
        w = draw_an(cfg, rng)
        weights = math.sqrt(cfg.power_watts) * (cfg.beta1 * bf.v + cfg.beta2 * proj.T @ w)
        ts = synthesize(pos, weights, selection, cfg, rng if args.noise else None, desired.R)
    else:
        ts = synthesize_received(pos, 1.0, bf.phases, selection, cfg,
                                 seed_sequence(cfg.seed, 2) if args.noise else None,
                                 ref_range=desired.R)
    bins = dft(ts, normalize=not args.unnormalized)
    header = provenance_header(cfg, theta_d_deg=desired.theta_deg, range_d_m=desired.R,
                               theta_deg=pos.theta_deg, range_m=pos.R, noise=args.noise,
                               codeword=args.codeword,
                               selection=" ".join(map(str, selection.indices)))
    out = _out_dir(args)
    (out / "waveform_time.csv").write_text(series_to_csv(ts.samples, header))
    (out / "waveform_bins.csv").write_text(series_to_csv(bins.bins, header))
    print(f"wrote {out / 'waveform_time.csv'} and {out / 'waveform_bins.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rscs-dm",
        description="Random-subcarrier-selection OFDM directional modulation simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sinr-map", help="SINR over an (angle, range) grid")
    _common(p)
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=180.0)
    p.add_argument("--theta-step", type=float, default=0.5)
    p.add_argument("--range-min", type=float, default=0.0)
    p.add_argument("--range-max", type=float, default=1000.0)
    p.add_argument("--range-step", type=float, default=2.0)
    p.add_argument("--receiver-mode", choices=("active-only", "all-bins"), default="active-only")
    p.add_argument("--uniform", action="store_true", help="evenly spaced subcarriers")
    p.add_argument("--figure", choices=("fig3", "fig4", "fig5"),
                   help="sweep bandwidth (fig3), antennas (fig4) or power split (fig5)")
    p.add_argument("--values", type=_float_list, help="comma-separated sweep values")
    p.add_argument("--output", default="sinr_map.csv")
    p.set_defaults(func=cmd_sinr_map)

    p = sub.add_parser("secrecy-rate", help="secrecy rate versus SNR or power split")
    _common(p)
    p.add_argument("--sweep", choices=("snr", "beta1"), default="snr")
    p.add_argument("--values", type=_float_list)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--theory-only", action="store_true")
    p.set_defaults(func=cmd_secrecy_rate)

    p = sub.add_parser("validate", help="run the invariant and oracle checks")
    _common(p)
    p.add_argument("--quick", action="store_true", help="fewer Monte-Carlo draws")
    p.add_argument("--distribution-report", action="store_true",
                   help="also write the SINR-distribution report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("selection-dump", help="write subcarrier selections as CSV")
    _common(p)
    p.add_argument("--mode", choices=("block", "symbol"), default="block")
    p.add_argument("--block-len", type=int, default=1)
    p.add_argument("--n-symbols", type=int, default=1)
    p.add_argument("--uniform", action="store_true")
    p.set_defaults(func=cmd_selection_dump)

    p = sub.add_parser("waveform-dump", help="write one received OFDM symbol and its DFT")
    _common(p)
    p.add_argument("--at-theta-deg", type=float, help="receiver angle (default: desired)")
    p.add_argument("--at-range-m", type=float, help="receiver range (default: desired)")
    p.add_argument("--noise", action="store_true")
    p.add_argument("--codeword", action="store_true",
                   help="transmit the full AN-aided codeword instead of the bare message")
    p.add_argument("--unnormalized", action="store_true", help="skip the 1/N DFT scaling")
    p.add_argument("--uniform", action="store_true")
    p.set_defaults(func=cmd_waveform_dump)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
