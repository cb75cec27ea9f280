#!/usr/bin/env python3
"""Sweep the nitrogen polarization and report the computational-subspace
population loss for one of the catalog search sequences."""

import argparse
import csv

import numpy as np

from nvpulse import paperlab


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--entry", default="robust_11")
    parser.add_argument("--points", type=int, default=21)
    parser.add_argument("--out", help="optional CSV output")
    args = parser.parse_args()

    seq = paperlab.catalog_entry(args.entry).sequence
    grid = np.linspace(1 / 3, 1.0, args.points)
    rows = paperlab.polarization_sweep(seq, grid)
    for p, loss in rows:
        print(f"p_N={p:.4f}  L_p={loss:.6f}")
    state = paperlab.NitrogenState((4 / 7, 2 / 7, 1 / 7))
    print(f"\nthermal-weights loss: "
          f"{paperlab.nitrogen_leakage(seq, state):.6f}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["polarization", "leakage"])
            writer.writerows((f"{p:.9g}", f"{l:.9g}") for p, l in rows)
        print(f"written to {args.out}")


if __name__ == "__main__":
    main()
