"""Command-line interface: verify the pulse catalog, optimize sequences,
simulate states, run sweeps, and emit FID spectra.

Exit codes: 0 success, 1 quality target missed, 2 usage or schema error.
All numeric CSV output uses 9 significant digits. Every run writes a
small manifest (<out>.manifest.json) recording the command, seed and
output paths.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys

import numpy as np

from . import ga, grover, paperlab
from .pulsesim import PulseSequence, evolve_state, populations, sequence_unitary
from .spinsys import NVParams, SpinRegister

EXIT_OK = 0
EXIT_QUALITY = 1
EXIT_USAGE = 2


def _fmt(x) -> str:
    return f"{float(x):.9g}"


def _default_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("NVPF_SEED")
    return int(env) if env else 0


def _atomic_write_rows(path, header, rows) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


def _write_manifest(command, config_path, seed, started, outputs) -> None:
    if not outputs:
        return
    manifest = {
        "command": command,
        "config_path": config_path,
        "seed": seed,
        "started": started,
        "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "output_paths": list(outputs),
    }
    path = f"{outputs[0]}.manifest.json"
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def cmd_verify(args) -> int:
    started = _now()
    if args.entry is not None:
        try:
            entries = [paperlab.catalog_entry(args.entry)]
        except KeyError:
            print(f"error: unknown catalog entry {args.entry!r}", file=sys.stderr)
            return EXIT_USAGE
    else:
        entries = paperlab.builtin_catalog()
    rows = paperlab.verify_catalog(entries, rabi_samples=args.rabi_samples)
    outputs = []
    if args.out:
        paperlab.write_verification_csv(rows, args.out)
        outputs.append(args.out)
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        print(
            f"{r.name:12s} computed={_fmt(r.computed)} "
            f"published={_fmt(r.published)} deviation={_fmt(r.deviation)} "
            f"{status}"
        )
    _write_manifest("verify", None, None, started, outputs)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_QUALITY


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_optimize(args) -> int:
    started = _now()
    if args.pulses < 1:
        print("error: --pulses must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        target = grover.spec_from_dict(_load_json(args.target))
        if args.ga:
            data = _load_json(args.ga)
            data["seed"] = _default_seed(args.seed if args.seed is not None
                                         else data.get("seed"))
            config = ga.GAConfig.from_dict(data)
        else:
            config = ga.GAConfig(seed=_default_seed(args.seed))
        robust = None
        if args.robust:
            lo, hi, k = args.robust.split(",")
            robust = (float(lo), float(hi), int(k))
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if isinstance(target, grover.ControlledRxSpec):
        couplings = paperlab.CARBON_TABLE[: target.n_carbons]
    else:
        couplings = paperlab.CARBON_TABLE[: target.n_qubits - 1]
    objective = ga.make_sequence_objective(
        target, args.pulses, NVParams(), couplings,
        rabi_mhz=args.rabi, robust=robust,
    )
    bounds = ga.ParameterBounds(n_pulses=args.pulses)
    result = ga.optimize(objective, bounds, config)

    seq = ga.decode_params(result.best_params, args.pulses, rabi_mhz=args.rabi)
    if robust is not None:
        seq = PulseSequence(
            rabi_mhz=seq.rabi_mhz,
            lead_delay_us=seq.lead_delay_us,
            segments=seq.segments,
            rabi_range_mhz=(robust[0], robust[1]),
        )
    outputs = []
    tmp = f"{args.out}.tmp"
    with open(tmp, "w") as fh:
        json.dump(seq.to_dict(), fh, indent=2)
        fh.write("\n")
    os.replace(tmp, args.out)
    outputs.append(args.out)
    trace_path = f"{args.out}.trace.csv"
    _atomic_write_rows(
        trace_path,
        ["generation", "best_fitness"],
        [(g, _fmt(f)) for g, f in enumerate(result.trace)],
    )
    outputs.append(trace_path)
    print(
        f"best_fitness={_fmt(result.best_fitness)} "
        f"generations={result.generations_run} "
        f"evaluations={result.evaluations}"
    )
    _write_manifest("optimize", args.target, config.seed, started, outputs)
    reached = result.best_fitness >= config.target_fitness
    return EXIT_OK if reached else EXIT_QUALITY


def _initial_state(label: str, dim: int) -> np.ndarray:
    if label == "mixed":
        return np.eye(dim, dtype=complex) / dim
    if set(label) <= {"0", "1"} and len(label) == int(np.log2(dim)):
        idx = int(label, 2)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[idx, idx] = 1.0
        return rho
    raise ValueError(f"unknown initial state {label!r}")


def cmd_simulate(args) -> int:
    started = _now()
    try:
        seq = PulseSequence.from_json(args.seq)
        couplings = paperlab.CARBON_TABLE[: args.carbons]
        register = SpinRegister(couplings=tuple(couplings))
        rho0 = _initial_state(args.initial, register.dim)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    dx, dy = register.drive_operators()
    rho = evolve_state(
        seq, rho0, register.hamiltonian(), dx, dy, rabi_override=args.rabi
    )
    pops = populations(rho)
    n_qubits = args.carbons + 1
    labels = [format(k, f"0{n_qubits}b") for k in range(register.dim)]
    outputs = []
    if args.out:
        _atomic_write_rows(
            args.out,
            ["state", "population"],
            [(lbl, _fmt(p)) for lbl, p in zip(labels, pops)],
        )
        outputs.append(args.out)
    for lbl, p in zip(labels, pops):
        print(f"P(|{lbl}>) = {_fmt(p)}")
    _write_manifest("simulate", args.seq, None, started, outputs)
    return EXIT_OK


def _parse_grid(text: str) -> np.ndarray:
    lo, hi, n = text.split(":")
    n = int(n)
    if n < 1:
        raise ValueError("grid must contain at least one point")
    lo, hi = float(lo), float(hi)
    return np.array([(lo + hi) / 2.0]) if n == 1 else np.linspace(lo, hi, n)


def cmd_sweep(args) -> int:
    started = _now()
    try:
        seq = PulseSequence.from_json(args.seq)
        grid = _parse_grid(args.grid)
    except (OSError, ValueError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.kind == "polarization":
        try:
            rows = paperlab.polarization_sweep(seq, grid)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        header = ["polarization", "leakage"]
    else:
        register = SpinRegister(couplings=paperlab.CARBON_TABLE[:1])
        h_free = register.hamiltonian()
        dx, dy = register.drive_operators()
        if args.target:
            u_target = grover.target_unitary(
                grover.spec_from_dict(_load_json(args.target))
            )
        else:
            u_target = grover.target_unitary(
                grover.GroverSpec(n_qubits=2, target_index=3)
            )
        from .pulsesim import gate_fidelity

        rows = []
        for w1 in grid:
            u = sequence_unitary(seq, h_free, dx, dy, rabi_override=float(w1))
            rows.append((float(w1), gate_fidelity(u, u_target)))
        header = ["rabi_mhz", "fidelity"]
    outputs = []
    if args.out:
        _atomic_write_rows(
            args.out, header, [(_fmt(x), _fmt(y)) for x, y in rows]
        )
        outputs.append(args.out)
    for x, y in rows:
        print(f"{_fmt(x)} {_fmt(y)}")
    _write_manifest("sweep", args.seq, None, started, outputs)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    started = _now()
    try:
        freq, amp = paperlab.fid_spectrum(
            args.transition, nu_d=args.nu_d, n_points=args.points
        )
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    outputs = []
    if args.out:
        _atomic_write_rows(
            args.out,
            ["frequency_mhz", "amplitude"],
            [(_fmt(f), _fmt(a)) for f, a in zip(freq, amp)],
        )
        outputs.append(args.out)
    peak = freq[int(np.argmax(amp))]
    print(f"points={len(freq)} strongest_peak_mhz={_fmt(peak)}")
    _write_manifest("spectrum", None, None, started, outputs)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvpulse",
        description="NV-center pulse-sequence simulation and optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check catalog fidelities")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--entry", help="single catalog entry name")
    group.add_argument("--all", action="store_true", help="all entries")
    p.add_argument("--rabi-samples", type=int, default=5)
    p.add_argument("--out", help="verification report CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", help="run the genetic optimizer")
    p.add_argument("--target", required=True, help="target spec JSON")
    p.add_argument("--pulses", type=int, required=True)
    p.add_argument("--robust", help="lo,hi,samples Rabi averaging window")
    p.add_argument("--ga", help="GA config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--rabi", type=float, default=0.5)
    p.add_argument("--out", required=True, help="best sequence JSON")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="evolve a state through a sequence")
    p.add_argument("--seq", required=True, help="sequence JSON")
    p.add_argument("--initial", default="00", help="basis label or 'mixed'")
    p.add_argument("--rabi", type=float)
    p.add_argument("--carbons", type=int, default=1)
    p.add_argument("--out", help="populations CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Rabi or polarization sweep")
    p.add_argument("--kind", choices=("rabi", "polarization"), required=True)
    p.add_argument("--seq", required=True, help="sequence JSON")
    p.add_argument("--grid", required=True, help="lo:hi:n")
    p.add_argument("--target", help="target spec JSON (rabi sweeps)")
    p.add_argument("--out", help="output CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="simulated FID spectrum")
    p.add_argument("--transition", choices=("minus", "plus"), required=True)
    p.add_argument("--nu-d", type=float, default=5.0, dest="nu_d")
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--out", help="output CSV")
    p.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
