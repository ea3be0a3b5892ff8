"""Command line: ecgingest <source-kind> <src> <out>.

Source kinds: 'challenge' (single-lead .mat archive + REFERENCE.csv) and
'wfdb' (annotated two-lead database directory). Exit codes: 0 success,
1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .challenge import convert_challenge_set
from .database import convert_annotated_db
from .segment import UnknownRhythmError
from .wfdb import FormatError


def build_parser():
    p = argparse.ArgumentParser(prog="ecgingest", description=__doc__)
    p.add_argument("kind", choices=("challenge", "wfdb"))
    p.add_argument("src", help="source directory")
    p.add_argument("out", help="output directory for manifest + payloads")
    p.add_argument("--database-id", default=None,
                   help="database tag in the manifest (wfdb only; default: "
                        "source directory name)")
    p.add_argument("--exclude", default=None, choices=("normal", "afib", "other"),
                   help="drop one class after mapping (binary-task manifests)")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        if args.kind == "challenge":
            records, skipped = convert_challenge_set(args.src, args.out)
        else:
            db = args.database_id or args.src.rstrip("/").rsplit("/", 1)[-1]
            records, skipped = convert_annotated_db(
                args.src, args.out, db, exclude=args.exclude)
    except (FileNotFoundError, FormatError, UnknownRhythmError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {len(records)} records ({skipped} sources skipped) -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
