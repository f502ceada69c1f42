"""Command line entry point: summary JSON in, figure files out."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import FigureSpec, plot_coverage_width, plot_runtime


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conformal-ts-figures", description=__doc__)
    parser.add_argument("--summary", required=True, help="path to the benchmark summary.json")
    parser.add_argument("--out", default="figures_out", help="output directory")
    parser.add_argument("--format", choices=("svg", "png"), default="svg")
    parser.add_argument("--process", action="append", default=None,
                        help="restrict panels to this process (repeatable)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        summary_path=Path(args.summary),
        out_dir=Path(args.out),
        image_format=args.format,
        processes=tuple(args.process or ()),
    )
    try:
        paths = plot_coverage_width(spec)
        paths.append(plot_runtime(spec))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(f"wrote {p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
