"""Command-line entry point: one verb per experiment type.

Exit codes: 0 success, 1 validation error, 2 numerical blowup, 3 I/O error.
"""

import argparse
import json
import sys

from .config import load_config, serialize_config
from .errors import NumericalBlowupError, ValidationError
from .runner import run_experiment, run_sweep, run_trajectory_stats


def _common(sub):
    sub.add_argument("config", help="path to a JSON experiment config")
    sub.add_argument("--out", default=None, help="override the output directory")
    sub.add_argument("--snapshots", choices=("on", "off"), default="off",
                     help="write binary field snapshots at every sample time")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker pool size for sweeps")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phaselab",
        description="Phase-space dynamics laboratory: classical Liouville vs "
                    "quantum Wigner-Moyal evolution with decoherence models.")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, text in (("simulate", "run one experiment"),
                       ("sweep", "run a parameter sweep"),
                       ("lyapunov", "trajectory statistics: Lyapunov exponent "
                                    "and ensemble diffusion"),
                       ("validate", "validate a config and print the resolved form")):
        _common(subs.add_parser(name, help=text))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            print("OK")
            print(serialize_config(cfg))
            return 0
        snapshots = args.snapshots == "on"
        if args.command == "simulate":
            report = run_experiment(cfg, out_dir=args.out, snapshots=snapshots)
            out = args.out or cfg.output_directory
            print(f"wrote {out}/report.json and {out}/diagnostics.ndjson "
                  f"({report.meta['n_steps']} steps, "
                  f"{report.meta['wall_clock_s']:.1f}s)")
            for key in ("lambda", "d_cl"):
                if key in report.derived:
                    print(f"{key} = {report.derived[key]:.6g}")
            for tok, bt in report.derived.get("break_times", {}).items():
                print(f"break_time[{tok}] = {bt if bt is not None else 'inf'}")
            return 0
        if args.command == "sweep":
            results, aggregate = run_sweep(cfg, out_dir=args.out,
                                           snapshots=snapshots,
                                           threads=max(1, args.threads))
            out = args.out or cfg.output_directory
            print(f"wrote {out}/aggregate.json ({len(aggregate)} runs)")
            for row in aggregate:
                print(json.dumps(row))
            return 0 if all(r["status"] == "ok" for r in results) else 2
        if args.command == "lyapunov":
            try:
                out = run_trajectory_stats(cfg, out_dir=args.out)
            except ValueError as err:
                raise ValidationError(str(err)) from err
            for key in ("lambda", "lambda_unit", "d_cl"):
                if key in out:
                    print(f"{key} = {out[key]}")
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except ValidationError as err:
        print(f"validation error: {err}", file=sys.stderr)
        return 1
    except NumericalBlowupError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
