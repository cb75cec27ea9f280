"""Pulse sequences, their unitaries, and gate/state fidelity measures.

A sequence with n pulses has n+1 delays: a lead delay tau_0 followed by
one (pulse, post-delay) pair per segment. The total propagator is the
time-ordered product

    U = Ud(tau_n) . Umw(t_n) ... Umw(t_1) . Ud(tau_0)

where each microwave propagator uses H_k = H_free + w1*(drive_x cos(phi_k)
+ drive_y sin(phi_k)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .spinsys import hermitian_propagator, is_hermitian


@dataclass(frozen=True)
class PulseSegment:
    """One microwave pulse (duration, phase) plus the delay after it."""

    pulse_us: float
    phase_deg: float
    post_delay_us: float

    def __post_init__(self):
        if self.pulse_us < 0 or self.post_delay_us < 0:
            raise ValueError("durations must be non-negative")
        object.__setattr__(self, "phase_deg", float(self.phase_deg) % 360.0)


@dataclass(frozen=True)
class PulseSequence:
    """Rabi frequency, lead delay and ordered pulse segments."""

    rabi_mhz: float
    lead_delay_us: float
    segments: tuple = ()
    rabi_range_mhz: tuple | None = None

    def __post_init__(self):
        if self.rabi_mhz <= 0:
            raise ValueError("rabi_mhz must be positive")
        if self.lead_delay_us < 0:
            raise ValueError("lead_delay_us must be non-negative")
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.rabi_range_mhz is not None:
            lo, hi = self.rabi_range_mhz
            if lo > hi:
                raise ValueError("rabi_range_mhz must be ordered")
            object.__setattr__(self, "rabi_range_mhz", (float(lo), float(hi)))

    @property
    def n_pulses(self) -> int:
        return len(self.segments)

    def to_dict(self) -> dict:
        out = {
            "rabi_mhz": self.rabi_mhz,
            "lead_delay_us": self.lead_delay_us,
            "segments": [
                {
                    "pulse_us": s.pulse_us,
                    "phase_deg": s.phase_deg,
                    "post_delay_us": s.post_delay_us,
                }
                for s in self.segments
            ],
        }
        if self.rabi_range_mhz is not None:
            out["rabi_range_mhz"] = list(self.rabi_range_mhz)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSequence":
        if not isinstance(data, dict):
            raise ValueError("sequence document must be a JSON object")
        allowed = {"rabi_mhz", "rabi_range_mhz", "lead_delay_us", "segments"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown sequence fields: {sorted(unknown)}")
        missing = {"rabi_mhz", "lead_delay_us", "segments"} - set(data)
        if missing:
            raise ValueError(f"missing sequence fields: {sorted(missing)}")
        seg_allowed = {"pulse_us", "phase_deg", "post_delay_us"}
        segments = []
        for k, seg in enumerate(data["segments"]):
            if not isinstance(seg, dict):
                raise ValueError("each segment must be a JSON object")
            bad = set(seg) - seg_allowed
            if bad:
                raise ValueError(f"segment {k}: unknown fields {sorted(bad)}")
            if set(seg) != seg_allowed:
                raise ValueError(f"segment {k}: missing fields")
            segments.append(
                PulseSegment(
                    float(seg["pulse_us"]),
                    float(seg["phase_deg"]),
                    float(seg["post_delay_us"]),
                )
            )
        rng = data.get("rabi_range_mhz")
        return cls(
            rabi_mhz=float(data["rabi_mhz"]),
            lead_delay_us=float(data["lead_delay_us"]),
            segments=tuple(segments),
            rabi_range_mhz=tuple(float(x) for x in rng) if rng else None,
        )

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "PulseSequence":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class FidelityReport:
    target_name: str
    fixed_fidelity: float
    duration_us: float
    robust_fidelity: float | None = None


def sequence_duration(seq: PulseSequence) -> float:
    """Total duration tau_0 + sum(t_k + tau_k) in microseconds."""
    return seq.lead_delay_us + sum(
        s.pulse_us + s.post_delay_us for s in seq.segments
    )


def sequence_unitary(
    seq: PulseSequence,
    h_free: np.ndarray,
    drive_x: np.ndarray,
    drive_y: np.ndarray,
    rabi_override: float | None = None,
) -> np.ndarray:
    """Total propagator of the sequence under the given system operators."""
    h_free = np.asarray(h_free, dtype=complex)
    if h_free.shape != drive_x.shape or h_free.shape != drive_y.shape:
        raise ValueError("operator dimensions must agree")
    if not (is_hermitian(drive_x) and is_hermitian(drive_y)):
        raise ValueError("drive operators must be Hermitian")
    w1 = seq.rabi_mhz if rabi_override is None else float(rabi_override)
    u = hermitian_propagator(h_free, seq.lead_delay_us)
    for s in seq.segments:
        phi = np.deg2rad(s.phase_deg)
        h_mw = h_free + w1 * (drive_x * np.cos(phi) + drive_y * np.sin(phi))
        u = hermitian_propagator(h_mw, s.pulse_us) @ u
        u = hermitian_propagator(h_free, s.post_delay_us) @ u
    return u


def gate_fidelity(u: np.ndarray, u_target: np.ndarray) -> float:
    """Global-phase-invariant overlap |Tr(U_T^dag U)| / dim."""
    u = np.asarray(u)
    u_target = np.asarray(u_target)
    if u.shape != u_target.shape:
        raise ValueError("dimension mismatch")
    dim = u.shape[0]
    return float(abs(np.trace(u_target.conj().T @ u)) / dim)


def robust_gate_fidelity(
    seq: PulseSequence,
    u_target: np.ndarray,
    h_free: np.ndarray,
    drive_x: np.ndarray,
    drive_y: np.ndarray,
    rabi_lo: float,
    rabi_hi: float,
    n_samples: int = 5,
) -> float:
    """Mean gate fidelity over a uniform Rabi grid including endpoints."""
    if rabi_lo > rabi_hi:
        raise ValueError("rabi_lo must not exceed rabi_hi")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if n_samples == 1:
        grid = np.array([(rabi_lo + rabi_hi) / 2.0])
    else:
        grid = np.linspace(rabi_lo, rabi_hi, n_samples)
    vals = [
        gate_fidelity(
            sequence_unitary(seq, h_free, drive_x, drive_y, rabi_override=w),
            u_target,
        )
        for w in grid
    ]
    return float(np.mean(vals))


def evolve_state(
    seq: PulseSequence,
    rho0: np.ndarray,
    h_free: np.ndarray,
    drive_x: np.ndarray,
    drive_y: np.ndarray,
    rabi_override: float | None = None,
) -> np.ndarray:
    """U rho0 U^dag with U the sequence unitary."""
    rho0 = np.asarray(rho0, dtype=complex)
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ValueError("rho0 must have unit trace")
    u = sequence_unitary(seq, h_free, drive_x, drive_y, rabi_override)
    if u.shape != rho0.shape:
        raise ValueError("dimension mismatch")
    return u @ rho0 @ u.conj().T


def populations(rho: np.ndarray) -> np.ndarray:
    """Real diagonal of a density matrix as basis-state populations."""
    diag = np.real(np.diag(np.asarray(rho)))
    if np.min(diag) < -1e-6:
        raise ValueError("density matrix has a significantly negative diagonal")
    return diag
