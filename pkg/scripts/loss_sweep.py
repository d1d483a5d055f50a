#!/usr/bin/env python3
"""Demonstrate loss tolerance: sweep eta over three decades per profile.

Every per-instance statistic should be flat in eta; only the attempt count
grows.  Output: results/loss_sweep.csv.

Run:  python scripts/loss_sweep.py [--count N]
"""
import argparse
import sys
from pathlib import Path

from qflip.cli import main as qflip_main


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=7707)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return qflip_main(
        ["sweep", "--phi-deg", "fair", "--v", "0.95", "--eta", "1.0,0.5,0.05",
         "--profile", "honest/honest,cheating/honest,honest/cheating",
         "--count", str(args.count), "--seed", str(args.seed),
         "--out", str(out / "loss_sweep.csv")]
    )


if __name__ == "__main__":
    sys.exit(run())
