"""Command line: xpm-plot --csv PATH --out PATH.png [--fields ...] [--methods ...]"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .render import EmptyDataError, MissingColumnError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xpm-plot",
        description="overlay plots (Im solid, Re dashed) from sweep CSV files",
    )
    parser.add_argument("--csv", required=True, help="sweep CSV input")
    parser.add_argument("--out", required=True, help="output image path (.png)")
    parser.add_argument("--fields", nargs="*", default=None, help="fields to plot")
    parser.add_argument("--methods", nargs="*", default=None, help="methods to overlay")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    spec = PlotSpec(
        csv_path=Path(args.csv),
        out_path=Path(args.out),
        fields=tuple(args.fields) if args.fields else None,
        methods=tuple(args.methods) if args.methods else None,
        dpi=args.dpi,
    )
    try:
        out = render(spec)
    except FileNotFoundError:
        print(f"error: no such file: {args.csv}", file=sys.stderr)
        return 1
    except (MissingColumnError, EmptyDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}", file=sys.stderr)
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
