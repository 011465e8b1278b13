"""Command-line scenario runner.

Subcommands reproduce the reference measurements from a declarative
config: ``fig2`` (correlation spectra), ``fig3`` (dense-coding
transmission), ``fig4`` (interception), ``sweep`` (parameter sweeps),
and ``calibrate`` (efficiency calibration).  All defaults encode the
published operating parameters; a config file or flags override them.

Exit codes: 0 success, 2 config error, 3 model error (e.g. pump above
threshold or an unphysical spectral matrix), 4 unachievable calibration
target.
"""

import argparse
import json
import sys

from .config import ConfigError, default_config, load_config
from .engine import SpectralModelError
from .nopa import AboveThresholdError, UnachievableTargetError
from .scenarios import (
    SCENARIO_DEFAULTS,
    SWEEP_AXES,
    calibrate,
    run_fig2,
    run_fig3,
    run_fig4,
    sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_CALIBRATION = 4

_RUNNERS = {"fig2": run_fig2, "fig3": run_fig3, "fig4": run_fig4}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="scenario config file (flat 'section.key = value' lines)")
    parser.add_argument("--seed", type=int, help="override engine.seed")
    parser.add_argument("--out", help="output directory (default: ./out/<subcommand>)")
    parser.add_argument("--samples", type=int, help="override the trace sample count")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="spectrum output format")
    parser.add_argument("--plot", action="store_true", help="also render each spectrum as SVG")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densecoding",
        description="Desk-scale simulator of dense coding with bright EPR beams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("fig2", "correlation spectra of the two Bell outputs vs the SNL"),
        ("fig3", "decoded amplitude/phase tone SNRs vs the SNL decode"),
        ("fig4", "eavesdropper spectrum of the modulated beam 1 alone"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
    p = sub.add_parser("sweep", help="analytic parameter sweep with monotonicity checks")
    _add_common(p)
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--points", type=int, default=21)
    p = sub.add_parser("calibrate", help="solve for the source efficiency hitting a squeezing target")
    _add_common(p)
    p.add_argument("--target-db", type=float, help="squeezed level target (dB re SNL, nonpositive)")
    p.add_argument("--target-db-y", type=float, help="separate target for the phase combination")
    return parser


def _resolve_config(args):
    base = SCENARIO_DEFAULTS.get(args.command, default_config)()
    cfg = load_config(args.config, base=base) if args.config else base
    overrides = {}
    if args.seed is not None:
        overrides["engine.seed"] = args.seed
    if args.samples is not None:
        overrides["engine.samples"] = args.samples
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out or f"out/{args.command}"
    try:
        cfg = _resolve_config(args)
        if args.command in _RUNNERS:
            doc = _RUNNERS[args.command](cfg, out_dir=out_dir, fmt=args.format, plot=args.plot)
            _print_metrics(doc.metrics)
        elif args.command == "sweep":
            doc = sweep(cfg, args.axis, args.start, args.stop, args.points, out_dir=out_dir, fmt=args.format, plot=args.plot)
            for key, value in doc.checks.items():
                print(f"{key}: {value}")
            print(f"{len(doc.metrics['rows'])} rows -> {out_dir}/sweep.csv")
        else:
            fragment = calibrate(cfg, target_db=args.target_db, target_db_y=args.target_db_y)
            print(f"nopa.eta_x = {fragment['nopa.eta_x']!r}")
            print(f"nopa.eta_y = {fragment['nopa.eta_y']!r}")
            print(json.dumps({k: v for k, v in fragment.items() if not k.startswith("nopa.")}, indent=2))
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnachievableTargetError as exc:
        print(f"calibration error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (AboveThresholdError, SpectralModelError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    print(f"results -> {out_dir}/results.json")
    return EXIT_OK


def _print_metrics(metrics: dict) -> None:
    for key in sorted(metrics):
        value = metrics[key]
        if isinstance(value, float):
            print(f"{key} = {value:.4f}")
        else:
            print(f"{key} = {value}")


if __name__ == "__main__":
    raise SystemExit(main())
