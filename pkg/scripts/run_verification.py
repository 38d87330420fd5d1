"""Run the full identity-verification battery plus the operator spectra.

Writes runs/verify and runs/spectrum.  Exit code is nonzero if any check
fails, so this doubles as a smoke test after edits.
"""
from __future__ import annotations

import argparse
import sys

from blacksoliton.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs")
    ap.add_argument("--sweep-L", default="20,30,40",
                    help="box half-lengths for the spectrum sweep")
    args = ap.parse_args()

    rc = main(["verify-lemmas", "--seed", str(args.seed),
               "--out", f"{args.out}/verify"])
    rc |= main(["spectrum", "--seed", str(args.seed),
                "--out", f"{args.out}/spectrum",
                "--sweep-L", args.sweep_L])
    return rc


if __name__ == "__main__":
    sys.exit(run())
