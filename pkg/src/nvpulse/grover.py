"""Ideal target unitaries: Hadamard layers, oracles, diffusion, Grover
circuits, and electron-controlled carbon rotations.

Basis order is big-endian with the electron as the most significant
qubit: for two qubits |00>, |01>, |10>, |11> with |1> on the electron
meaning m_S = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class GroverSpec:
    n_qubits: int
    target_index: int
    iterations: int = 1
    include_prep: bool = True
    name: str = ""

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if not (0 <= self.target_index < 2 ** self.n_qubits):
            raise ValueError("target_index out of range")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass(frozen=True)
class ControlledRxSpec:
    n_carbons: int
    j: int
    name: str = ""

    def __post_init__(self):
        if not (1 <= self.j <= self.n_carbons):
            raise ValueError("carbon index j out of range")


def hadamard_layer(n: int) -> np.ndarray:
    """n-fold tensor power of the 2x2 Hadamard."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = np.array([[1.0 + 0.0j]])
    for _ in range(n):
        out = np.kron(out, HADAMARD)
    return out


def oracle_unitary(n: int, target_index: int) -> np.ndarray:
    """Phase flip on one marked basis state: I - 2|t><t|."""
    dim = 2 ** n
    if not (0 <= target_index < dim):
        raise ValueError("target_index out of range")
    diag = np.ones(dim, dtype=complex)
    diag[target_index] = -1.0
    return np.diag(diag)


def diffusion_unitary(n: int) -> np.ndarray:
    """Inversion about the mean: 2|psi><psi| - I on the uniform state."""
    if n < 1:
        raise ValueError("n must be >= 1")
    dim = 2 ** n
    return (2.0 / dim) * np.ones((dim, dim), dtype=complex) - np.eye(dim)


def grover_circuit_unitary(spec: GroverSpec) -> np.ndarray:
    """(D . I_t)^m, optionally preceded by the Hadamard preparation layer."""
    d = diffusion_unitary(spec.n_qubits)
    it = oracle_unitary(spec.n_qubits, spec.target_index)
    u = np.linalg.matrix_power(d @ it, spec.iterations)
    if spec.include_prep:
        u = u @ hadamard_layer(spec.n_qubits)
    return u


def optimal_iterations(n: int) -> int:
    """round(pi / (4 arcsin(2^{-n/2})) - 1/2), floored at one iteration."""
    if n < 1:
        raise ValueError("n must be >= 1")
    theta = np.arcsin(2.0 ** (-n / 2.0))
    return max(1, int(round(np.pi / (4.0 * theta) - 0.5)))


def success_probability(n: int, m: int) -> float:
    """Closed-form Grover success probability sin^2((2m+1) theta)."""
    theta = np.arcsin(2.0 ** (-n / 2.0))
    return float(np.sin((2 * m + 1) * theta) ** 2)


def single_qubit_rotation(theta: float, phi: float) -> np.ndarray:
    """exp(-i theta [I_x cos(phi) + I_y sin(phi)]) on a spin-1/2."""
    gen = 0.5 * np.array(
        [
            [0.0, np.cos(phi) - 1j * np.sin(phi)],
            [np.cos(phi) + 1j * np.sin(phi), 0.0],
        ],
        dtype=complex,
    )
    return (
        np.cos(theta / 2.0) * np.eye(2, dtype=complex)
        - 1j * np.sin(theta / 2.0) * 2.0 * gen
    )


def controlled_rx_target(n_carbons: int, j: int) -> np.ndarray:
    """Controlled pi rotation of carbon j, conditioned on m_S = -1.

    Identity on the m_S = 0 electron branch; exp(-i pi I_x) = -i sigma_x
    on carbon j when the electron is in m_S = -1.
    """
    if not (1 <= j <= n_carbons):
        raise ValueError("carbon index j out of range")
    rx = single_qubit_rotation(np.pi, 0.0)
    branch = np.array([[1.0 + 0.0j]])
    for k in range(1, n_carbons + 1):
        branch = np.kron(branch, rx if k == j else np.eye(2, dtype=complex))
    dim_c = 2 ** n_carbons
    out = np.zeros((2 * dim_c, 2 * dim_c), dtype=complex)
    out[:dim_c, :dim_c] = np.eye(dim_c)
    out[dim_c:, dim_c:] = branch
    return out


def target_unitary(spec) -> np.ndarray:
    """Dispatch a target spec to its ideal unitary matrix."""
    if isinstance(spec, GroverSpec):
        return grover_circuit_unitary(spec)
    if isinstance(spec, ControlledRxSpec):
        return controlled_rx_target(spec.n_carbons, spec.j)
    if isinstance(spec, np.ndarray):
        return spec
    raise TypeError(f"unsupported target spec: {type(spec)!r}")


def spec_from_dict(data: dict):
    """Parse a target spec from its JSON form."""
    kind = data.get("kind")
    if kind == "grover":
        return GroverSpec(
            n_qubits=int(data["n_qubits"]),
            target_index=int(data["target_index"]),
            iterations=int(data.get("iterations", 1)),
            include_prep=bool(data.get("include_prep", True)),
            name=str(data.get("name", "")),
        )
    if kind == "controlled_rx":
        return ControlledRxSpec(
            n_carbons=int(data["n_carbons"]),
            j=int(data["j"]),
            name=str(data.get("name", "")),
        )
    raise ValueError(f"unknown target kind: {kind!r}")


def spec_to_dict(spec) -> dict:
    if isinstance(spec, GroverSpec):
        return {
            "kind": "grover",
            "n_qubits": spec.n_qubits,
            "target_index": spec.target_index,
            "iterations": spec.iterations,
            "include_prep": spec.include_prep,
            "name": spec.name,
        }
    if isinstance(spec, ControlledRxSpec):
        return {
            "kind": "controlled_rx",
            "n_carbons": spec.n_carbons,
            "j": spec.j,
            "name": spec.name,
        }
    raise TypeError(f"unsupported target spec: {type(spec)!r}")
