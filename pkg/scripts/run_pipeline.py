#!/usr/bin/env python3
"""Run every experiment family at the desk profile into out/desk/.

Usage: python3 scripts/run_pipeline.py [--seed N] [--jobs N] [--profile desk|paper]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from farmscape.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20260814)
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--profile", default="desk", choices=("desk", "paper"))
    parser.add_argument("--out", default="out")
    args = parser.parse_args()

    base = Path(args.out) / args.profile
    common = [
        "--seed",
        str(args.seed),
        "--jobs",
        str(args.jobs),
        "--profile",
        args.profile,
    ]
    stages = [
        ["sweep-fig3", "--out", str(base / "fig3")],
        ["policy-grid", "--out", str(base / "fig4")],
        ["phase-diagram", "--out", str(base / "fig5")],
        ["calibrate", "--out", str(base / "calibration")],
    ]
    for stage in stages:
        print("farmscape", *stage)
        code = cli_main(stage + common)
        if code != 0:
            print(f"stage failed with exit code {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
