"""Command-line figure rendering for simulator result CSVs."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risfd-plot",
        description="Render result CSVs into convergence/sweep/CDF figures")
    parser.add_argument("inputs", nargs="+", help="input CSV files")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    parser.add_argument("--title", default="")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(input_csvs=tuple(args.inputs), kind=args.kind,
                          output_path=args.out, xlabel=args.xlabel,
                          ylabel=args.ylabel, title=args.title)
        print(render(spec))
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
