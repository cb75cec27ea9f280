#!/usr/bin/env python3
"""Simulate the free-induction-decay spectrum of one ESR doublet and
print the strongest lines next to the eigenvalue-difference prediction."""

import argparse
import csv

import numpy as np

from nvpulse import paperlab


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--transition", choices=("minus", "plus"),
                        default="minus")
    parser.add_argument("--nu-d", type=float, default=5.0, dest="nu_d")
    parser.add_argument("--points", type=int, default=4096)
    parser.add_argument("--out", help="optional CSV output")
    args = parser.parse_args()

    freq, amp = paperlab.fid_spectrum(
        args.transition, nu_d=args.nu_d, n_points=args.points
    )
    peaks = [
        (freq[i], amp[i])
        for i in range(1, len(freq) - 1)
        if amp[i] > amp[i - 1] and amp[i] > amp[i + 1]
        and amp[i] > 0.1 * amp.max()
    ]
    peaks.sort(key=lambda p: -p[1])
    print("strongest peaks (MHz, amplitude):")
    for f, a in peaks[:12]:
        print(f"  {f:7.3f}  {a:9.3f}")
    print("\npredicted line offsets from the detection frequency:")
    for offset, weight in paperlab.predicted_spectrum_lines(args.transition):
        print(f"  {offset:+7.3f} MHz  weight {weight:.2f}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frequency_mhz", "amplitude"])
            writer.writerows(
                (f"{f:.9g}", f"{a:.9g}") for f, a in zip(freq, amp)
            )
        print(f"\nwritten to {args.out}")


if __name__ == "__main__":
    main()
