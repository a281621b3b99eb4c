"""ramcast-plot render --csv <path> --kind <convergence|sweep> --out <path> [--db]"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotInputError, PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ramcast-plot")
    subs = parser.add_subparsers(dest="command", required=True)
    sp = subs.add_parser("render", help="render one figure from a harness CSV")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--kind", required=True, choices=KINDS)
    sp.add_argument("--out", required=True)
    sp.add_argument("--db", action="store_true", help="plot in dB instead of linear")
    args = parser.parse_args(argv)

    try:
        out = render(PlotSpec(csv_path=args.csv, kind=args.kind,
                              out_path=args.out, db=args.db))
    except FileNotFoundError:
        print(f"error: no such file: {args.csv}", file=sys.stderr)
        return 2
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
