"""Command line front end: ``dopo-figures render <figure-id> ...``.

Exit codes: 0 success, 1 schema or IO failure, 3 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .csvdata import read_table
from .errors import FigureError, UsageError
from .render import _RENDERERS, render_figure


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _output_base(path: str) -> str:
    base, ext = os.path.splitext(path)
    if ext.lower() in (".png", ".svg"):
        return base
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dopo-figures",
                     description="Render figures from dopo-lab CSV files")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure to PNG and SVG")
    p.add_argument("figure_id", choices=sorted(_RENDERERS))
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="CSV", help="input CSV files")
    p.add_argument("--out", dest="output", required=True,
                   help="output image path; extension is replaced")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tables = [read_table(path) for path in args.inputs]
        written = render_figure(args.figure_id, tables, _output_base(args.output))
        for path in written:
            print(path)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3
    except FigureError as exc:
        print(f"{exc.code} error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
