#!/usr/bin/env python3
"""Optimize a pulse sequence for a Grover search or controlled-rotation
target with the seeded genetic algorithm, then report the result."""

import argparse
import os

import numpy as np

from nvpulse import ga, grover, paperlab
from nvpulse.spinsys import NVParams


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=("grover", "crx"), default="grover")
    parser.add_argument("--index", type=int, default=3,
                        help="search target index (grover) or carbon j (crx)")
    parser.add_argument("--carbons", type=int, default=1)
    parser.add_argument("--pulses", type=int, default=4)
    parser.add_argument("--rabi", type=float, default=0.5)
    parser.add_argument("--robust", action="store_true",
                        help="average fidelity over 0.48-0.52 MHz")
    parser.add_argument("--seed", type=int,
                        default=int(os.environ.get("NVPF_SEED", "0")))
    parser.add_argument("--generations", type=int, default=1000)
    parser.add_argument("--target-fitness", type=float, default=0.99)
    parser.add_argument("--out", help="write the best sequence JSON here")
    args = parser.parse_args()

    if args.kind == "grover":
        target = grover.GroverSpec(
            n_qubits=args.carbons + 1, target_index=args.index
        )
    else:
        target = grover.ControlledRxSpec(n_carbons=args.carbons, j=args.index)
    couplings = paperlab.CARBON_TABLE[: args.carbons]
    robust = (0.48, 0.52, 5) if args.robust else None
    objective = ga.make_sequence_objective(
        target, args.pulses, NVParams(), couplings,
        rabi_mhz=args.rabi, robust=robust,
    )
    config = ga.GAConfig(
        seed=args.seed,
        max_generations=args.generations,
        target_fitness=args.target_fitness,
    )
    result = ga.optimize(objective, ga.ParameterBounds(args.pulses), config)

    print(f"best fitness      {result.best_fitness:.6f}")
    print(f"generations       {result.generations_run}")
    print(f"evaluations       {result.evaluations}")
    seq = ga.decode_params(result.best_params, args.pulses, rabi_mhz=args.rabi)
    print(f"lead delay        {seq.lead_delay_us:.3f} us")
    for k, s in enumerate(seq.segments, 1):
        print(f"pulse {k}: t={s.pulse_us:.3f} us  phi={s.phase_deg:6.1f} deg"
              f"  tau={s.post_delay_us:.3f} us")
    if args.out:
        seq.to_json(args.out)
        print(f"sequence written to {args.out}")


if __name__ == "__main__":
    main()
