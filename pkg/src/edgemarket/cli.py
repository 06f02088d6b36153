"""Command-line interface: run, sweep, calibrate, verify.

Exit status is 0 on success and 1 on any error or failed verification;
diagnostics go to stderr, data to --out files or stdout.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .harness import STRATEGIES, format_csv, run_one, sweep
from .scenario import (
    DEFAULT_CONFIG,
    CalibrationError,
    calibrate,
    config_to_text,
    load_config,
    save_config,
)
from .verify import run_verification


def _load(args) -> "ScenarioConfig":
    config = load_config(args.config) if args.config else DEFAULT_CONFIG
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    return config


def _cmd_run(args) -> int:
    config = _load(args)
    strategies = STRATEGIES if args.strategy == "all" else (args.strategy,)
    rows = [run_one(config, s) for s in strategies]
    text = format_csv(rows, include_wall_time=not args.no_timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args)
    values = [int(v) for v in args.values.split(",")]
    seeds = list(range(args.seeds))
    strategies = list(STRATEGIES) if args.strategy == "all" else [args.strategy]
    rows = sweep(config, args.axis, values, seeds, strategies)
    text = format_csv(rows, include_wall_time=not args.no_timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_calibrate(args) -> int:
    config = _load(args)
    try:
        calibrated = calibrate(config, args.target_n)
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return 1
    if args.out:
        save_config(calibrated, args.out)
    else:
        sys.stdout.write(config_to_text(calibrated))
    return 0


def _cmd_verify(args) -> int:
    config = _load(args)
    failures = 0
    for name, ok, detail in run_verification(config):
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: {detail}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgemarket",
        description="Edge-compute pricing and task allocation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_seed=True):
        p.add_argument("--config", help="scenario config file (key = value lines)")
        if with_seed:
            p.add_argument("--seed", type=int, help="override the config seed")

    p_run = sub.add_parser("run", help="run one scenario")
    common(p_run)
    p_run.add_argument("--strategy", default="proposed",
                       choices=STRATEGIES + ("all",))
    p_run.add_argument("--out", help="CSV output path (default: stdout)")
    p_run.add_argument("--no-timing", action="store_true",
                       help="omit the wall_time_s column")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep device counts across seeds")
    common(p_sweep, with_seed=False)
    p_sweep.add_argument("--axis", required=True, choices=("n_tds", "n_ads"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values, e.g. 100,110,120")
    p_sweep.add_argument("--seeds", type=int, default=10,
                         help="number of seeds, 0..n-1 (default 10)")
    p_sweep.add_argument("--strategy", default="all", choices=STRATEGIES + ("all",))
    p_sweep.add_argument("--out", help="CSV output path (default: stdout)")
    p_sweep.add_argument("--no-timing", action="store_true",
                         help="omit the wall_time_s column for byte-stable files")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cal = sub.add_parser("calibrate", help="tune demand scale to a target device count")
    common(p_cal, with_seed=False)
    p_cal.add_argument("--target-n", type=int, default=100)
    p_cal.add_argument("--out", help="write the calibrated config here")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_ver = sub.add_parser("verify", help="run the oracle verification battery")
    common(p_ver, with_seed=False)
    p_ver.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
