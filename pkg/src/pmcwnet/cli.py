"""Command-line front end.

Subcommands:

    run <config>         execute an experiment, write artifacts
    validate <config>    print diagnostics without running
    codes search|verify|gen-p3
    pn synth|psd

Config format (flat key=value lines under [section] headers, # comments):

    [waveform]
    carrier_hz = 79e9        chip_s = 1e-9
    code_length = 504        n_bursts = 256
    code_family = p3         # or: file, with code_file = path

    [pn]
    enabled = true           mode = exact   # or linearized
    mask_file = pll_mask.txt # omit for the built-in mask
    f_max_hz = 1e8           master_seed = 1

    [pipeline]
    compensation = true      window = none  # or hann

    [outputs]
    dir = out                heatmaps = true
    raw_frames = false

    [node1]                  # one section per radar, ids 1..M
    position_m = -0.5, 0     boresight = 0, 1
    tx_power_dbm = 10
    antenna_deg_db = 0:10, 6:10, 90:-7
    # or: gain_boresight_db = 10 / gain_broadside_db = -7

    [target1]
    position_m = 0, 4.975    velocity_mps = 0, 0
    rcs_dbsm = 10

(one key per line in an actual file; pairs shown side by side here only
to keep this docstring short).

Exit codes: 0 success, 1 unexpected failure, 2 bad config, 3 LOS
reference not found, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .codes import (
    generate_p3,
    load_sequence,
    save_sequence,
    search_apas,
    verify_almost_perfect,
)
from .config import parse_config, validate
from .errors import ConfigError, IoError, LOSNotFoundError, PmcwError
from .experiment import run as run_experiment
from .phasenoise import (
    default_pll_mask,
    estimate_psd,
    evaluate_grid,
    load_mask,
    synthesize,
)

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmcwnet",
        description="PMCW radar network simulator with PLL phase-noise modeling",
    )
    parser.add_argument("--version", action="version", version=f"pmcwnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="experiment config file")
    p_run.add_argument("--seed", type=lambda s: int(s, 0), help="override master seed")
    p_run.add_argument("--out-dir", help="override output directory")
    p_run.add_argument(
        "--no-compensation",
        action="store_true",
        help="skip the LOS-reference phase correction",
    )
    p_run.add_argument("--no-pn", action="store_true", help="disable phase noise")
    p_run.add_argument(
        "--window",
        choices=("none", "hann"),
        help="override the slow-time window",
    )

    p_val = sub.add_parser("validate", help="check a config, print diagnostics")
    p_val.add_argument("config", help="experiment config file")

    p_codes = sub.add_parser("codes", help="code sequence utilities")
    codes_sub = p_codes.add_subparsers(dest="codes_command", required=True)

    p_search = codes_sub.add_parser(
        "search", help="exhaustive search for almost-perfect binary sequences"
    )
    p_search.add_argument("length", type=int, help="even sequence length (<= 20)")
    p_search.add_argument("--out", help="write the first hit to this file")

    p_verify = codes_sub.add_parser(
        "verify", help="check a sequence file for the almost-perfect property"
    )
    p_verify.add_argument("file", help="sequence file")
    p_verify.add_argument("--tolerance", type=float, default=0.0)

    p_gen = codes_sub.add_parser(
        "gen-p3", help="generate a polyphase quadratic-phase sequence"
    )
    p_gen.add_argument("length", type=int)
    p_gen.add_argument("out", help="output sequence file")

    p_pn = sub.add_parser("pn", help="phase-noise utilities")
    pn_sub = p_pn.add_subparsers(dest="pn_command", required=True)

    p_synth = pn_sub.add_parser(
        "synth", help="synthesize a realization, write samples as CSV"
    )
    p_synth.add_argument("--mask", help="mask file (omit for the built-in mask)")
    p_synth.add_argument("--duration", type=float, required=True, help="seconds")
    p_synth.add_argument("--rate", type=float, required=True, help="samples/s")
    p_synth.add_argument("--f-max", type=float, default=1e8, help="band edge, Hz")
    p_synth.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    p_synth.add_argument("out", help="output CSV of 't_s,phi_rad' lines")

    p_psd = pn_sub.add_parser(
        "psd", help="synthesize, estimate the PSD, compare to the mask"
    )
    p_psd.add_argument("--mask", help="mask file (omit for the built-in mask)")
    p_psd.add_argument("--duration", type=float, required=True, help="seconds")
    p_psd.add_argument("--rate", type=float, required=True, help="samples/s")
    p_psd.add_argument("--f-max", type=float, default=1e8, help="band edge, Hz")
    p_psd.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    p_psd.add_argument("--segments", type=int, default=4)
    p_psd.add_argument("out", help="output CSV of 'f_hz,psd_dbc_hz,mask_dbc_hz'")

    return parser


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    if args.seed is not None:
        config.master_seed = args.seed
    if args.out_dir is not None:
        config.out_dir = args.out_dir
    if args.no_compensation:
        config.compensation = False
    if args.no_pn:
        config.pn_enabled = False
    if args.window is not None:
        config.window = args.window
    result = run_experiment(config)
    for path in result.files:
        print(path)
    print(f"metrics: {result.out_dir / 'metrics.json'}")
    return 0


def _cmd_validate(args) -> int:
    config = parse_config(args.config)
    diags = validate(config)
    for diag in diags:
        print(diag)
    if any(d.severity == "error" for d in diags):
        return 2
    print("ok")
    return 0


def _cmd_codes(args) -> int:
    if args.codes_command == "search":
        hits = search_apas(args.length)
        if not hits:
            print(f"no almost-perfect binary sequences of length {args.length}")
            return 1
        print(f"{len(hits)} canonical sequences of length {args.length}:")
        for seq in hits:
            print(" ".join("+1" if c.real > 0 else "-1" for c in seq.chips))
        if args.out:
            save_sequence(hits[0], args.out)
            print(f"wrote {args.out}")
        return 0
    if args.codes_command == "verify":
        seq = load_sequence(args.file)
        report = verify_almost_perfect(seq, tolerance=args.tolerance)
        print(
            f"length {seq.length}: peak {report.peak:.6g}, "
            f"half-lag {report.half_lag_value:.6g}, "
            f"max off-peak sidelobe {report.max_sidelobe:.3e}"
        )
        print("almost-perfect" if report.passed else "NOT almost-perfect")
        return 0 if report.passed else 1
    if args.codes_command == "gen-p3":
        seq = generate_p3(args.length)
        save_sequence(seq, args.out)
        print(f"wrote {args.out} ({seq.length} chips)")
        return 0
    raise ConfigError(f"unknown codes subcommand {args.codes_command!r}")


def _load_cli_mask(mask_arg):
    if mask_arg is None:
        return default_pll_mask()
    return load_mask(mask_arg)


def _cmd_pn(args) -> int:
    mask = _load_cli_mask(args.mask)
    process = synthesize(
        mask,
        total_duration_s=args.duration,
        f_max_hz=args.f_max,
        seed=args.seed,
    )
    n = int(round(args.duration * args.rate))
    phi = evaluate_grid(process, n, args.rate)
    if args.pn_command == "synth":
        try:
            with open(args.out, "w") as fh:
                fh.write("t_s,phi_rad\n")
                for i, v in enumerate(phi):
                    fh.write(f"{i / args.rate!r},{float(v)!r}\n")
        except OSError as exc:
            raise IoError(f"cannot write {args.out}: {exc}") from exc
        print(
            f"wrote {args.out}: {n} samples, {process.freqs.size} lines, "
            f"rms {process.rms_rad:.4e} rad"
        )
        return 0
    if args.pn_command == "psd":
        freqs, psd_db = estimate_psd(phi, args.rate, n_segments=args.segments)
        mask_db = np.array([mask.level_db(f) for f in freqs])
        try:
            with open(args.out, "w") as fh:
                fh.write("f_hz,psd_dbc_hz,mask_dbc_hz\n")
                for f, p, m in zip(freqs, psd_db, mask_db):
                    fh.write(f"{float(f)!r},{p:.6f},{m:.6f}\n")
        except OSError as exc:
            raise IoError(f"cannot write {args.out}: {exc}") from exc
        in_band = (freqs >= mask.freqs_hz[0]) & (freqs <= min(mask.freqs_hz[-1], args.f_max))
        if np.any(in_band):
            err = psd_db[in_band] - mask_db[in_band]
            print(
                f"wrote {args.out}: {freqs.size} bins, in-band PSD-mask error "
                f"mean {float(np.mean(err)):+.3f} dB, "
                f"max |{float(np.max(np.abs(err))):.3f}| dB"
            )
        else:
            print(f"wrote {args.out}: {freqs.size} bins (none inside the mask band)")
        return 0
    raise ConfigError(f"unknown pn subcommand {args.pn_command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "codes":
            return _cmd_codes(args)
        if args.command == "pn":
            return _cmd_pn(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LOSNotFoundError as exc:
        print(f"LOS reference not found: {exc}", file=sys.stderr)
        return 3
    except IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except PmcwError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
