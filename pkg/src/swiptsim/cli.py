"""Command-line entry point ``swipt-sim``.

    swipt-sim run --config scenario.txt [overrides] [--sweep rho --values 0.2,0.5,0.8] [--out f.csv]
    swipt-sim figure fig4 --out results/ [--trials N --min-errors N --seed S]

Exit codes: 0 success, 2 usage or configuration error, 3 runtime or
numerical error (including any sweep point that failed).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import AccuracyError, ContractError, DomainError
from .harness.config import ConfigError, ScenarioConfig, build_scenario, parse_config_text
from .harness.presets import PRESETS, run_figure
from .harness.sweep import AXES, emit_csv, sweep, write_csv

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("swiptsim")

# flag -> config key; None values are dropped before building the scenario
_OVERRIDES = (
    ("protocol", dict(choices=("ps", "ts", "grid"))),
    ("mod", dict(choices=("dpsk", "fsk"))),
    ("rho", dict(type=float)),
    ("alpha", dict(type=float)),
    ("rate", dict(type=float)),
    ("d0d", dict(type=float)),
    ("pathloss", dict(choices=("bounded", "indoor"))),
    ("exponent", dict(type=float)),
    ("detector", dict(choices=("mld", "gld"))),
    ("trials", dict(type=int, help="maximum trials per point")),
    ("min-errors", dict(type=int)),
    ("seed", dict(type=int)),
)


def _add_overrides(p: argparse.ArgumentParser, scenario_flags: bool = True):
    if scenario_flags:
        p.add_argument("-M", dest="M", type=int)
        p.add_argument("-K", dest="K", type=int)
        p.add_argument("--snr-db", help="comma-separated SNR grid in dB")
        p.add_argument("--d0r", help="comma-separated source-relay distances")
    for flag, kw in _OVERRIDES:
        p.add_argument(f"--{flag}", dest=flag.replace("-", "_"), **kw)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true", help="log each finished point")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swipt-sim", description="SER simulator for SWIPT noncoherent AF relaying")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario (SNR grid or a sweep) and write CSV")
    run.add_argument("--config", type=Path, help="key = value scenario file")
    run.add_argument("--sweep", choices=AXES, help="sweep axis (default: the SNR grid)")
    run.add_argument("--values", help="comma-separated sweep values")
    run.add_argument("--out", type=Path, help="CSV path (default: stdout)")
    _add_overrides(run)

    fig = sub.add_parser("figure", help="run a named figure preset")
    fig.add_argument("preset", choices=tuple(PRESETS))
    fig.add_argument("--out", type=Path, required=True, help="output directory")
    fig.add_argument("--curves", help="comma-separated subset of curve names")
    _add_overrides(fig, scenario_flags=False)
    return parser


def _cli_settings(args) -> dict:
    keys = ["M", "K", "snr_db", "d0r"] + [f.replace("-", "_") for f, _ in _OVERRIDES]
    return {k: getattr(args, k, None) for k in keys if getattr(args, k, None) is not None}


def _cmd_run(args) -> int:
    settings = {}
    if args.config is not None:
        settings.update(parse_config_text(args.config.read_text(encoding="utf-8")))
    settings.update(_cli_settings(args))
    for key in ("sweep", "values", "out"):
        if getattr(args, key) is not None:
            settings[key] = str(getattr(args, key))
    if args.workers != 1:
        settings["workers"] = args.workers
    scenario, run_opts = build_scenario(settings)
    axis = run_opts.get("sweep", "snr")
    if axis not in AXES:
        raise ConfigError(f"sweep axis must be one of {AXES}")
    values = run_opts.get("values")
    if values is None:
        if axis != "snr":
            raise ConfigError(f"a {axis} sweep needs --values")
        values = scenario.snr_db
    elif axis == "M":
        values = tuple(int(v) for v in values)
    workers = run_opts.get("workers", 1)
    out = run_opts.get("out")

    rows = []

    def tracked():
        for row in sweep(scenario, axis, values, workers=workers):
            if row.error:
                log.error("point failed: %s", row.error)
            else:
                e = row.estimate
                log.info("%s point: ser=%.4g (%d/%d)", axis, e.ser, e.errors, e.trials)
            rows.append(row)
            yield row

    if out is None:
        write_csv(tracked(), sys.stdout, scenario, axis)
    else:
        emit_csv(tracked(), out, scenario, axis)
    return EXIT_RUNTIME if any(r.error for r in rows) else EXIT_OK


def _cmd_figure(args) -> int:
    settings = _cli_settings(args)
    overrides = {}
    if settings:
        # validate through the same path as config files, then keep only what was set
        probe, _ = build_scenario(settings, ScenarioConfig())
        for key in settings:
            if key in ("trials", "min_errors"):
                overrides["trials"] = probe.trials
            elif key == "mod":
                overrides["modulation"] = probe.modulation
            else:
                overrides[key] = getattr(probe, key)
    curves = args.curves.split(",") if args.curves else None
    paths, failures = run_figure(args.preset, args.out, workers=args.workers, curves=curves, **overrides)
    for p in paths:
        print(p)
    return EXIT_RUNTIME if failures else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_figure(args)
    except ConfigError as exc:
        print(f"swipt-sim: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ContractError, AccuracyError, FloatingPointError, OSError) as exc:
        print(f"swipt-sim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
