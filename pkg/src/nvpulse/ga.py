"""Seeded real-coded genetic algorithm over pulse-sequence parameters.

The parameter vector layout is [tau_0, t_1, phi_1, tau_1, ..., t_n,
phi_n, tau_n] (length 3n+1). Phase genes are circular: they mutate with
wraparound modulo 360 instead of clipping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import grover
from .pulsesim import PulseSegment, PulseSequence, gate_fidelity
from .spinsys import NVParams, SpinRegister


@dataclass(frozen=True)
class ParameterBounds:
    """Box bounds for a fixed-length pulse sequence."""

    n_pulses: int
    pulse_us: tuple = (0.0, 4.0)
    delay_us: tuple = (0.0, 6.0)

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be >= 1")
        for lo, hi in (self.pulse_us, self.delay_us):
            if lo < 0 or lo > hi:
                raise ValueError("bounds must satisfy 0 <= lo <= hi")

    @property
    def n_params(self) -> int:
        return 3 * self.n_pulses + 1

    def arrays(self):
        """(lower, upper, is_phase) vectors in parameter-vector layout."""
        lo = np.empty(self.n_params)
        hi = np.empty(self.n_params)
        phase = np.zeros(self.n_params, dtype=bool)
        lo[0], hi[0] = self.delay_us
        for k in range(self.n_pulses):
            base = 1 + 3 * k
            lo[base], hi[base] = self.pulse_us
            lo[base + 1], hi[base + 1] = 0.0, 360.0
            phase[base + 1] = True
            lo[base + 2], hi[base + 2] = self.delay_us
        return lo, hi, phase


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    max_generations: int = 1000
    crossover_rate: float = 0.9
    mutation_rate: float = 0.15
    mutation_sigma: float = 0.05
    elite_count: int = 2
    tournament_size: int = 3
    target_fitness: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not (self.population_size >= self.elite_count >= 0):
            raise ValueError("population_size must be >= elite_count >= 0")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be >= 2")
        if not (0.0 <= self.crossover_rate <= 1.0):
            raise ValueError("crossover_rate must be in [0,1]")
        if not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must be in [0,1]")

    @classmethod
    def from_dict(cls, data: dict) -> "GAConfig":
        fields = {
            "population_size",
            "max_generations",
            "crossover_rate",
            "mutation_rate",
            "mutation_sigma",
            "elite_count",
            "tournament_size",
            "target_fitness",
            "seed",
        }
        unknown = set(data) - fields
        if unknown:
            raise ValueError(f"unknown GA config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class OptimizationResult:
    best_params: np.ndarray
    best_fitness: float
    trace: np.ndarray
    generations_run: int
    evaluations: int


def decode_params(vector, n_pulses: int, rabi_mhz: float = 0.5) -> PulseSequence:
    """Parameter vector -> PulseSequence."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (3 * n_pulses + 1,):
        raise ValueError("parameter vector has wrong length")
    segments = [
        PulseSegment(vector[1 + 3 * k], vector[2 + 3 * k], vector[3 + 3 * k])
        for k in range(n_pulses)
    ]
    return PulseSequence(
        rabi_mhz=rabi_mhz, lead_delay_us=vector[0], segments=tuple(segments)
    )


def encode_params(seq: PulseSequence) -> np.ndarray:
    """PulseSequence -> parameter vector (inverse of decode_params)."""
    out = [seq.lead_delay_us]
    for s in seq.segments:
        out.extend([s.pulse_us, s.phase_deg, s.post_delay_us])
    return np.array(out)


class _CachedSystem:
    """Eigendecomposition cache for fast repeated sequence evaluation.

    Uses the identity H_free + w1*(sx cos(phi) + sy sin(phi)) =
    R(phi) (H_free + w1*sx) R(phi)^dag with diagonal R(phi) =
    exp(-i phi s_z (x) I), valid because H_free commutes with s_z (x) I.
    """

    def __init__(self, h_free: np.ndarray, rabi_values):
        dim = h_free.shape[0]
        half = dim // 2
        self.z_diag = np.concatenate([np.full(half, 0.5), np.full(half, -0.5)])
        self.w_free, self.v_free = np.linalg.eigh(h_free)
        sx = np.zeros((dim, dim))
        sx[:half, half:] = 0.5 * np.eye(half)
        sx[half:, :half] = 0.5 * np.eye(half)
        self.mw = {}
        for w1 in rabi_values:
            self.mw[w1] = np.linalg.eigh(h_free + w1 * sx)

    def free_prop(self, t: float) -> np.ndarray:
        phase = np.exp(-2j * np.pi * self.w_free * t)
        return (self.v_free * phase) @ self.v_free.conj().T

    def pulse_prop(self, w1: float, t: float, phase_deg: float) -> np.ndarray:
        w, v = self.mw[w1]
        u0 = (v * np.exp(-2j * np.pi * w * t)) @ v.conj().T
        r = np.exp(-1j * np.deg2rad(phase_deg) * self.z_diag)
        return (u0 * r[:, None]) * r.conj()[None, :]

    def sequence_unitary(self, params: np.ndarray, w1: float) -> np.ndarray:
        u = self.free_prop(params[0])
        n = (len(params) - 1) // 3
        for k in range(n):
            t, phi, tau = params[1 + 3 * k : 4 + 3 * k]
            u = self.pulse_prop(w1, t, phi) @ u
            if tau > 0:
                u = self.free_prop(tau) @ u
        return u


def make_sequence_objective(
    target,
    n_pulses: int,
    params: NVParams,
    couplings,
    rabi_mhz: float = 0.5,
    robust: tuple | None = None,
):
    """Build a fitness function mapping parameter vectors to gate fidelity.

    With robust=(lo, hi, n_samples) the fitness is the mean fidelity over
    a uniform Rabi grid; otherwise the fixed-Rabi fidelity at rabi_mhz.
    """
    u_target = grover.target_unitary(target)
    register = SpinRegister(params=params, couplings=tuple(couplings))
    if u_target.shape[0] != register.dim:
        raise ValueError("target dimension does not match the spin system")
    if robust is None:
        rabi_values = (float(rabi_mhz),)
    else:
        lo, hi, n_samples = robust
        rabi_values = tuple(np.linspace(lo, hi, int(n_samples)))
    cache = _CachedSystem(register.hamiltonian(), rabi_values)

    def objective(vector) -> float:
        vector = np.asarray(vector, dtype=float)
        fids = [
            gate_fidelity(cache.sequence_unitary(vector, w1), u_target)
            for w1 in rabi_values
        ]
        return float(np.mean(fids))

    return objective


def _tournament(rng, fitness, k):
    contenders = rng.integers(0, len(fitness), size=k)
    return contenders[np.argmax(fitness[contenders])]


# Restart-epoch schedule: the population is re-seeded every EPOCH_LENGTH
# generations (keeping the all-time best as the result), and within each
# epoch the mutation scale anneals geometrically from 2*sigma down to
# sigma/10. Short annealed epochs escape the many local optima of pulse
# landscapes far more reliably than one long run.
EPOCH_LENGTH = 50
SIGMA_START_FACTOR = 2.0
SIGMA_END_FACTOR = 0.1


def optimize(
    objective, bounds: ParameterBounds, config: GAConfig
) -> OptimizationResult:
    """Elitist generational GA with restart epochs; reproducible by seed."""
    lo, hi, is_phase = bounds.arrays()
    span = hi - lo
    rng = np.random.default_rng(config.seed)

    def fresh_population():
        return lo + rng.random((config.population_size, bounds.n_params)) * span

    pop = fresh_population()
    fitness = np.array([objective(ind) for ind in pop])
    evaluations = config.population_size
    best_idx = int(np.argmax(fitness))
    best_params = pop[best_idx].copy()
    trace = [float(fitness[best_idx])]
    generations = 0
    epoch_gen = 0

    for _ in range(config.max_generations):
        if trace[-1] >= config.target_fitness:
            break
        if epoch_gen >= EPOCH_LENGTH:
            pop = fresh_population()
            epoch_gen = 0
        else:
            decay = (SIGMA_END_FACTOR / SIGMA_START_FACTOR) ** (
                epoch_gen / EPOCH_LENGTH
            )
            sigma = config.mutation_sigma * SIGMA_START_FACTOR * decay
            order = np.argsort(fitness)[::-1]
            new_pop = [pop[i].copy() for i in order[: config.elite_count]]
            while len(new_pop) < config.population_size:
                pa = pop[_tournament(rng, fitness, config.tournament_size)]
                pb = pop[_tournament(rng, fitness, config.tournament_size)]
                child = pa.copy()
                if rng.random() < config.crossover_rate:
                    mask = rng.random(bounds.n_params) < 0.5
                    child[mask] = pb[mask]
                mutate = rng.random(bounds.n_params) < config.mutation_rate
                noise = rng.normal(0.0, 1.0, bounds.n_params)
                child = np.where(mutate, child + noise * sigma * span, child)
                child[is_phase] %= 360.0
                child = np.clip(child, lo, hi)
                child[is_phase] %= 360.0
                new_pop.append(child)
            pop = np.array(new_pop)
            epoch_gen += 1
        fitness = np.array([objective(ind) for ind in pop])
        evaluations += config.population_size
        generations += 1
        gen_best = int(np.argmax(fitness))
        if fitness[gen_best] > trace[-1]:
            best_params = pop[gen_best].copy()
        trace.append(max(trace[-1], float(fitness[gen_best])))

    trace_arr = np.array(trace)
    return OptimizationResult(
        best_params=best_params,
        best_fitness=float(trace_arr[-1]),
        trace=trace_arr,
        generations_run=generations,
        evaluations=evaluations,
    )
