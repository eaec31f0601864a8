"""Regenerate domains.json, proof*.json and expected.json for the packaged case studies."""
import argparse
import sys

from prhl.cases import CASES, case_files
from prhl.cases.common import DATA


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help="case studies to export (default: all)")
    ap.add_argument("--check", action="store_true", help="only report files that are out of date")
    args = ap.parse_args(argv)
    stale = 0
    for name in args.names or sorted(CASES):
        for fname, text in case_files(name).items():
            path = DATA / name / fname
            old = path.read_text(encoding="utf-8") if path.exists() else None
            if old == text:
                continue
            stale += 1
            if args.check:
                print(f"out of date: {path}", file=sys.stderr)
            else:
                path.write_text(text, encoding="utf-8")
                print(f"wrote {path}")
    return 1 if args.check and stale else 0


if __name__ == "__main__":
    sys.exit(main())
