#!/usr/bin/env python3
"""Run the three benchmark sweeps back to back and optionally render figures.

This is a convenience wrapper over the CLI; expect the power sweep with the
optimized scheme to take a while at full depth (hundreds of solver calls per
run). Use RA_OPT_THREADS to cap the worker pool.
"""

import argparse
import subprocess
import sys
from pathlib import Path


def run(args):
    print("+", " ".join(args))
    subprocess.run(args, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--config", default=None)
    ap.add_argument("--render", action="store_true", help="also render PNGs (needs ramcast-plotkit)")
    args = ap.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = ["--config", args.config] if args.config else []
    jobs = [
        ("sweep-power", outdir / "fig_power.csv"),
        ("sweep-angle", outdir / "fig_angle.csv"),
        ("sweep-antennas", outdir / "fig_antennas.csv"),
    ]
    for sub, out in jobs:
        run([sys.executable, "-m", "ramcast.cli", sub, *cfg,
             "--seeds", str(args.seeds), "--out", str(out)])
        if args.render:
            run([sys.executable, "-m", "plotkit.cli", "render", "--csv", str(out),
                 "--kind", "sweep", "--out", str(out.with_suffix(".png")), "--db"])


if __name__ == "__main__":
    main()
