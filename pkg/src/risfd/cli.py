"""Command-line front end: ``risfd run`` and ``risfd summarize``."""

from __future__ import annotations

import argparse
import os
import sys

from .experiments import (SCENARIOS, SCHEMES, ConfigError, ExperimentSpec,
                          parse_config_file, run_scenario, summarize)

DEFAULT_OUTDIR_VAR = "RISFD_OUTDIR"


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"seeds must be comma-separated integers: {text!r}")


def _parse_overrides(pairs: list[str]) -> tuple[tuple[str, str], ...]:
    out = []
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out.append((key.strip(), value.strip()))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risfd",
        description="RIS-aided full-duplex secrecy simulator and trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one scenario grid")
    run_p.add_argument("--scenario", required=True,
                       choices=sorted(SCENARIOS))
    run_p.add_argument("--seeds", default="0,1,2,3,4",
                       help="comma-separated seed list (default 0,1,2,3,4)")
    run_p.add_argument("--outdir",
                       default=os.environ.get(DEFAULT_OUTDIR_VAR, "results"),
                       help=f"output directory (default ${DEFAULT_OUTDIR_VAR} "
                            "or ./results)")
    run_p.add_argument("--config", default=None,
                       help="flat key = value config file")
    run_p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
    run_p.add_argument("--schemes", default=None,
                       help=f"comma-separated subset of: {', '.join(SCHEMES)}")
    run_p.add_argument("--workers", type=int, default=1,
                       help="parallel grid workers")

    sum_p = sub.add_parser("summarize", help="aggregate result CSVs")
    sum_p.add_argument("--out", required=True, help="summary CSV path")
    sum_p.add_argument("inputs", nargs="+", help="reward/sweep CSV files")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            schemes = None
            if args.schemes:
                schemes = tuple(s.strip() for s in args.schemes.split(",")
                                if s.strip())
            spec = ExperimentSpec(
                scenario=args.scenario,
                seeds=_parse_seeds(args.seeds),
                outdir=args.outdir,
                overrides=_parse_overrides(args.overrides),
                schemes=schemes,
                workers=max(1, args.workers))
            file_values = parse_config_file(args.config) if args.config else None
            written = run_scenario(spec, file_values)
            for path in written:
                print(path)
        else:
            print(summarize(args.inputs, args.out))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
