"""``figures`` command: render every figure family from one report CSV."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .frames import ReportError, load_report
from .plots import render_all

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_MISSING = 3
EXIT_SCHEMA = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render reachability, bow-tie, membership and success figures from a report CSV.",
    )
    parser.add_argument("--report", required=True, help="long-format report CSV")
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument(
        "--dump-table",
        action="store_true",
        help="also write CSV tables of the exact plotted values",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        frame = load_report(args.report)
        written = render_all(frame, Path(args.out), dump_table=args.dump_table)
    except FileNotFoundError as exc:
        sys.stderr.write(json.dumps({"error": "missing-input", "message": str(exc)}) + "\n")
        return EXIT_MISSING
    except ReportError as exc:
        sys.stderr.write(json.dumps({"error": "schema-mismatch", "message": str(exc)}) + "\n")
        return EXIT_SCHEMA
    for path in written:
        print(path)
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
