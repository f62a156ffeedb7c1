"""Command-line entry point for the experiment harness.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    DETECTORS,
    EXPERIMENTS,
    WAVEFORMS,
    ConfigError,
    NumericError,
    parse_config,
    run,
)

_LARGE_TRIALS = {"papr": 20000, "psd": 200, "af": 1, "ber": 20000,
                 "sense": 500, "loopback": 100, "gram": 100}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="afbm-sim",
        description="Affine filter-bank modulation experiment runner",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--waveform", choices=WAVEFORMS)
    p.add_argument("--L", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--P", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--R", type=int, help="number of channel paths")
    p.add_argument("--ell-max", type=int, dest="ell_max")
    p.add_argument("--f-max", type=float, dest="f_max")
    p.add_argument("--snr", help="comma-separated SNR list in dB")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--detector", choices=DETECTORS)
    p.add_argument("--out", help="output directory")
    p.add_argument(
        "--large",
        action="store_true",
        help="paper-scale trial counts (overrides --trials when larger)",
    )
    return p


def _overrides(args: argparse.Namespace) -> dict:
    out: dict = {"experiment": args.experiment}
    mapping = {
        "waveform": args.waveform,
        "L": args.L,
        "N": args.N,
        "P": args.P,
        "K": args.K,
        "R": args.R,
        "ell_max": args.ell_max,
        "f_max": args.f_max,
        "trials": args.trials,
        "master_seed": args.seed,
        "detector": args.detector,
        "out_dir": args.out,
    }
    for key, val in mapping.items():
        if val is not None:
            out[key] = val
    if args.snr is not None:
        out["snr_db"] = tuple(float(v) for v in args.snr.split(",") if v.strip())
    if args.large:
        out["large"] = True
        big = _LARGE_TRIALS[args.experiment]
        if out.get("trials", 0) < big:
            out["trials"] = big
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    print(f"{cfg.experiment}: wrote results to {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
