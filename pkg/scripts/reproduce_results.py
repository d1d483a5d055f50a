#!/usr/bin/env python3
"""Reproduce the headline numbers end to end.

Emits into results/ (created next to this script's working directory):

  predictions.csv   closed-form table for both state families at several
                    visibilities, including the fair angle
  panels.csv        simulated sequential-coin-flipping panels: honest runs
                    at V=0.96 and one-cheater runs at V=0.91, 80k instances
                    each, one panel group per profile family

Run:  python scripts/reproduce_results.py [--count N] [--seed S]
"""
import argparse
import math
import sys
from pathlib import Path

from qflip import analysis
from qflip.cli import main as qflip_main


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=80_000, help="instances per panel")
    parser.add_argument("--seed", type=int, default=20100325)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    fair = analysis.find_fair_phi()
    print(f"fair angle: {math.degrees(fair):.4f} deg")
    print(f"P_A(45deg) = {analysis.p_alice_opt(math.pi / 4):.6f}")
    print(f"P_B(45deg) = {analysis.p_bob_opt(math.pi / 4):.6f}")

    code = qflip_main(
        ["analyze", "--phi-deg", "45,fair", "--v", "1.0,0.96,0.91",
         "--csv", str(out / "predictions.csv")]
    )
    if code:
        return code

    # honest panels at the honest-run visibility
    code = qflip_main(
        ["sweep", "--phi-deg", "45,fair", "--v", "0.96", "--eta", "1.0",
         "--profile", "honest/honest", "--count", str(args.count),
         "--seed", str(args.seed), "--out", str(out / "panels_honest.csv")]
    )
    if code:
        return code

    # one-cheater panels at the measured visibility
    code = qflip_main(
        ["sweep", "--phi-deg", "45,fair", "--v", "0.91", "--eta", "1.0",
         "--profile", "cheating/honest,honest/cheating", "--count", str(args.count),
         "--seed", str(args.seed + 1), "--out", str(out / "panels_cheating.csv")]
    )
    if code:
        return code

    merged = out / "panels.csv"
    honest_lines = (out / "panels_honest.csv").read_text().splitlines()
    cheat_lines = (out / "panels_cheating.csv").read_text().splitlines()
    merged.write_text("\n".join(honest_lines + cheat_lines[1:]) + "\n")
    print(f"wrote {out / 'predictions.csv'} and {merged}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
