"""Script entry: render a figure-data JSON file to SVG (and optionally PNG)."""

from __future__ import annotations

import argparse
import json
import sys

from .document import SchemaError, load_document
from .render import render_png, render_svg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsx-figures",
        description="Render qsx figure-data JSON to SVG.",
    )
    parser.add_argument("input", help="path to the figure-data JSON document")
    parser.add_argument("--projection", choices=("barycentric-2d", "ambient-3d"),
                        default="barycentric-2d")
    parser.add_argument("--out", default="figure.svg", help="SVG output path")
    parser.add_argument("--png", default=None, help="optional PNG output path")
    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        document = load_document(ns.input)
        render_svg(document, ns.projection, ns.out)
        if ns.png:
            render_png(document, ns.projection, ns.png)
    except SchemaError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "IOError", "message": str(exc)}) + "\n")
        return 2
    return 0


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
