"""Command line interface: ``irsfso <command> [options]``.

Every command writes CSV to ``--out`` (or stdout). Exit status is 0 on
success, 1 when a validation check fails and 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import replace

from .beam import GeometryWarning
from .scenario import (
    COMMANDS,
    SUITES,
    TEMPLATES,
    ConfigError,
    ResultTable,
    ScenarioConfig,
    load_config,
    run_sweep,
    template,
    validate,
    write_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irsfso", description="IRS-assisted multi-link FSO channel and performance models.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI scenario file (defaults apply to omitted keys)")
    common.add_argument("--template", choices=sorted(TEMPLATES), help="start from a named experiment")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--trials", type=int, help="Monte Carlo trials")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--workers", type=int, default=1, help="parallel sweep points")
    common.add_argument("--protocol", choices=["td", "irsd", "irsh"], action="append", help="restrict to protocol (repeatable)")
    common.add_argument("--profile", choices=["lp", "qp"], action="append", help="restrict to phase profile (repeatable)")
    common.add_argument("--oracle", choices=["none", "separable1d", "exact2d"], default="none", help="diffraction oracle for field-map")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    v = sub.add_parser("validate", parents=[common])
    v.add_argument("suite", nargs="?", default="all", choices=list(SUITES) + ["all"])
    return p


def _config(args) -> ScenarioConfig:
    if args.config and args.template:
        raise ConfigError("--config and --template are mutually exclusive")
    if args.template:
        return template(args.template)[1]
    if args.config:
        return load_config(args.config)
    return ScenarioConfig()


def _emit(table: ResultTable, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_csv(table, fh)
    else:
        write_csv(table, sys.stdout)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.trials is not None or args.seed is not None:
            mc = cfg.mc
            cfg = replace(cfg, mc=replace(mc, trials=args.trials if args.trials is not None else mc.trials,
                                          seed=args.seed if args.seed is not None else mc.seed))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GeometryWarning)
        if args.command == "validate":
            checks = validate(cfg, args.suite)
            cols = ("suite", "check", "expected", "actual", "tolerance", "status")
            rows = tuple((c.suite, c.name, c.expected, c.actual, c.tolerance, "PASS" if c.passed else "FAIL") for c in checks)
            _emit(ResultTable("validate", cols, rows), args.out)
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION
        table = run_sweep(cfg, args.command, protocols=args.protocol, profiles=args.profile, oracle=args.oracle,
                          workers=max(1, args.workers))
    _emit(table, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
