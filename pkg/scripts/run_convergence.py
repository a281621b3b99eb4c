#!/usr/bin/env python3
"""Convergence curves of the optimized scheme for several directivity factors.

Writes one CSV in the harness row schema (axis_value = iteration index, one
scheme label per directivity value), ready for `ramcast-plot render --kind
convergence --db`.
"""

import argparse
from dataclasses import replace

from ramcast import harness


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="convergence.csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--p", default="1,3,5", help="comma list of directivity factors")
    args = ap.parse_args()

    params = dict(harness.DEFAULT_SCENARIO)
    rows = []
    for p in (float(v) for v in args.p.split(",")):
        config, geometry = harness.build_scenario(params)
        config = replace(config, directivity_factor=p)
        label = f"ra_p{p:g}"
        rows.extend(harness.convergence_rows(config, geometry, args.seed, label))
        print(f"{label}: {rows[-1][4]:.2f} dB after {int(rows[-1][0])} iterations")
    harness.write_rows(args.out, rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
