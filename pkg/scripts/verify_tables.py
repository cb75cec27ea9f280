#!/usr/bin/env python3
"""Evaluate every catalog entry and print computed vs published fidelity."""

import argparse

from nvpulse import paperlab


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", help="optional CSV report path")
    parser.add_argument("--rabi-samples", type=int, default=5)
    args = parser.parse_args()

    rows = paperlab.verify_catalog(rabi_samples=args.rabi_samples)
    width = max(len(r.name) for r in rows)
    for r in rows:
        flag = "ok  " if r.passed else "FAIL"
        print(f"{r.name:<{width}}  computed={r.computed:.6f}  "
              f"published={r.published:.4f}  |dev|={r.deviation:.6f}  {flag}")
    n_pass = sum(r.passed for r in rows)
    print(f"\n{n_pass}/{len(rows)} entries within tolerance")
    if args.out:
        paperlab.write_verification_csv(rows, args.out)
        print(f"report written to {args.out}")


if __name__ == "__main__":
    main()
