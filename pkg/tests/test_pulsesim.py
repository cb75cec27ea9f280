import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvpulse.pulsesim import (
    PulseSegment,
    PulseSequence,
    evolve_state,
    gate_fidelity,
    populations,
    robust_gate_fidelity,
    sequence_duration,
    sequence_unitary,
)
from nvpulse.spinsys import NVParams, SpinRegister, is_unitary

REGISTER = SpinRegister()
H_FREE = REGISTER.hamiltonian()
DX, DY = REGISTER.drive_operators()


def random_sequence(rng, n_pulses):
    segments = tuple(
        PulseSegment(rng.uniform(0, 4), rng.uniform(0, 360), rng.uniform(0, 6))
        for _ in range(n_pulses)
    )
    return PulseSequence(
        rabi_mhz=rng.uniform(0.1, 2.0),
        lead_delay_us=rng.uniform(0, 6),
        segments=segments,
    )


def random_unitary(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestPulseSequence:
    def test_phase_normalized(self):
        seg = PulseSegment(1.0, 400.0, 0.5)
        assert seg.phase_deg == pytest.approx(40.0)

    def test_negative_duration_rejected(self):
        with pytest.raises(ValueError):
            PulseSegment(-1.0, 0.0, 0.0)

    def test_json_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        seq = random_sequence(rng, 4)
        path = tmp_path / "seq.json"
        seq.to_json(path)
        again = PulseSequence.from_json(path)
        assert again == seq

    def test_unknown_field_rejected(self):
        doc = {
            "rabi_mhz": 0.5,
            "lead_delay_us": 0.0,
            "segments": [],
            "bogus": 1,
        }
        with pytest.raises(ValueError, match="unknown"):
            PulseSequence.from_dict(doc)

    def test_unknown_segment_field_rejected(self):
        doc = {
            "rabi_mhz": 0.5,
            "lead_delay_us": 0.0,
            "segments": [
                {"pulse_us": 1, "phase_deg": 0, "post_delay_us": 0, "x": 1}
            ],
        }
        with pytest.raises(ValueError):
            PulseSequence.from_dict(doc)

    def test_missing_field_rejected(self):
        with pytest.raises(ValueError, match="missing"):
            PulseSequence.from_dict({"rabi_mhz": 0.5, "segments": []})

    def test_rabi_range_serialized(self):
        seq = PulseSequence(0.5, 0.1, (), rabi_range_mhz=(0.48, 0.52))
        doc = seq.to_dict()
        assert doc["rabi_range_mhz"] == [0.48, 0.52]
        assert PulseSequence.from_dict(doc) == seq


class TestSequenceDuration:
    def test_empty(self):
        assert sequence_duration(PulseSequence(0.5, 0.0)) == 0.0

    def test_sum(self):
        seq = PulseSequence(
            0.5, 1.0, (PulseSegment(0.5, 0, 0.25), PulseSegment(1.5, 90, 0.75))
        )
        assert sequence_duration(seq) == pytest.approx(4.0)


class TestSequenceUnitary:
    def test_empty_is_identity(self):
        seq = PulseSequence(0.5, 0.0)
        u = sequence_unitary(seq, H_FREE, DX, DY)
        assert np.allclose(u, np.eye(4))

    def test_pi_pulse_flips_electron(self):
        seq = PulseSequence(0.5, 0.0, (PulseSegment(1.0, 0.0, 0.0),))
        u = sequence_unitary(seq, np.zeros((4, 4)), DX, DY)
        psi = u @ np.array([1.0, 0.0, 0.0, 0.0])
        assert abs(psi[2]) == pytest.approx(1.0, abs=1e-10)

    def test_rabi_override(self):
        seq = PulseSequence(0.5, 0.0, (PulseSegment(1.0, 0.0, 0.0),))
        u_override = sequence_unitary(seq, H_FREE, DX, DY, rabi_override=0.52)
        seq52 = PulseSequence(0.52, 0.0, seq.segments)
        u_direct = sequence_unitary(seq52, H_FREE, DX, DY)
        assert np.max(np.abs(u_override - u_direct)) < 1e-12

    def test_dimension_mismatch(self):
        seq = PulseSequence(0.5, 0.0)
        with pytest.raises(ValueError):
            sequence_unitary(seq, H_FREE, np.eye(2), np.eye(2))

    def test_concatenation(self):
        rng = np.random.default_rng(11)
        a = random_sequence(rng, 2)
        b = random_sequence(rng, 2)
        w1 = 0.5
        joined = PulseSequence(
            w1,
            a.lead_delay_us,
            a.segments[:-1]
            + (
                PulseSegment(
                    a.segments[-1].pulse_us,
                    a.segments[-1].phase_deg,
                    a.segments[-1].post_delay_us + b.lead_delay_us,
                ),
            )
            + b.segments,
        )
        ua = sequence_unitary(
            PulseSequence(w1, a.lead_delay_us, a.segments), H_FREE, DX, DY
        )
        ub = sequence_unitary(
            PulseSequence(w1, b.lead_delay_us, b.segments), H_FREE, DX, DY
        )
        uj = sequence_unitary(joined, H_FREE, DX, DY)
        assert np.max(np.abs(uj - ub @ ua)) < 1e-9

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1), st.integers(0, 5))
    def test_always_unitary(self, seed, n_pulses):
        rng = np.random.default_rng(seed)
        seq = random_sequence(rng, n_pulses)
        u = sequence_unitary(seq, H_FREE, DX, DY)
        assert is_unitary(u, 1e-10)


class TestGateFidelity:
    def test_self_fidelity(self):
        rng = np.random.default_rng(5)
        u = random_unitary(rng, 4)
        assert gate_fidelity(u, u) == pytest.approx(1.0)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(6)
        u = random_unitary(rng, 4)
        assert gate_fidelity(u, np.exp(0.73j) * u) == pytest.approx(1.0)

    def test_range(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            f = gate_fidelity(random_unitary(rng, 4), random_unitary(rng, 4))
            assert 0.0 <= f <= 1.0 + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            gate_fidelity(np.eye(2), np.eye(4))


class TestRobustFidelity:
    def test_degenerate_interval_matches_fixed(self):
        rng = np.random.default_rng(9)
        seq = random_sequence(rng, 3)
        target = random_unitary(rng, 4)
        fixed = gate_fidelity(
            sequence_unitary(seq, H_FREE, DX, DY, rabi_override=0.5), target
        )
        robust = robust_gate_fidelity(
            seq, target, H_FREE, DX, DY, 0.5, 0.5, 5
        )
        assert robust == pytest.approx(fixed)

    def test_equals_mean_of_samples(self):
        rng = np.random.default_rng(10)
        seq = random_sequence(rng, 3)
        target = random_unitary(rng, 4)
        robust = robust_gate_fidelity(
            seq, target, H_FREE, DX, DY, 0.48, 0.52, 5
        )
        grid = np.linspace(0.48, 0.52, 5)
        manual = np.mean(
            [
                gate_fidelity(
                    sequence_unitary(seq, H_FREE, DX, DY, rabi_override=w),
                    target,
                )
                for w in grid
            ]
        )
        assert robust == pytest.approx(manual)

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            robust_gate_fidelity(
                PulseSequence(0.5, 0.0), np.eye(4), H_FREE, DX, DY, 0.6, 0.4
            )


class TestEvolveState:
    def test_identity_sequence(self):
        rho0 = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
        rho = evolve_state(PulseSequence(0.5, 0.0), rho0, H_FREE, DX, DY)
        assert np.allclose(rho, rho0)

    def test_trace_preserved(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            seq = random_sequence(rng, 3)
            probs = rng.random(4)
            probs /= probs.sum()
            rho0 = np.diag(probs).astype(complex)
            rho = evolve_state(seq, rho0, H_FREE, DX, DY)
            assert abs(np.trace(rho) - 1.0) < 1e-10
            assert np.min(np.linalg.eigvalsh(rho)) > -1e-9

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            evolve_state(
                PulseSequence(0.5, 0.0), np.eye(4), H_FREE, DX, DY
            )


class TestPopulations:
    def test_pure_state(self):
        rho = np.zeros((4, 4))
        rho[2, 2] = 1.0
        assert np.allclose(populations(rho), [0, 0, 1, 0])

    def test_maximally_mixed(self):
        assert np.allclose(populations(np.eye(4) / 4), 0.25)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            populations(np.diag([1.1, -0.1, 0.0, 0.0]))
