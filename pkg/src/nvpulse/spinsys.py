"""Spin operators, Hamiltonians and propagators for the NV register.

All Hamiltonians are stored in cyclic-frequency units (MHz); time is in
microseconds. Propagators therefore include the 2*pi factor:
U = exp(-i * 2*pi * H * t).

Electron basis conventions:
  * spin-1 operators use the m_S = (+1, 0, -1) ordering;
  * the driven {m_S=0, m_S=-1} doublet is treated as a pseudo-spin-1/2
    with s_z = +1/2 for m_S=0 (first basis state).
Qubit ordering is big-endian with the electron as the most significant
qubit, carbons following in coupling-list order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-10

# Pseudo-spin-1/2 operators (s_z = +1/2 on the first basis state).
SPIN_HALF_X = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
SPIN_HALF_Y = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
SPIN_HALF_Z = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)

# Spin-1 operators, m = (+1, 0, -1) ordering.
_S1 = 1.0 / np.sqrt(2.0)
SPIN_ONE_X = np.array(
    [[0.0, _S1, 0.0], [_S1, 0.0, _S1], [0.0, _S1, 0.0]], dtype=complex
)
SPIN_ONE_Y = np.array(
    [[0.0, -1j * _S1, 0.0], [1j * _S1, 0.0, -1j * _S1], [0.0, 1j * _S1, 0.0]],
    dtype=complex,
)
SPIN_ONE_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(h - h.conj().T)) <= tol)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    d = u.shape[0]
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(d))) <= tol)


@dataclass(frozen=True)
class NVParams:
    """Static parameters of the NV center register.

    Frequencies in MHz, field in mT, gyromagnetic ratios in MHz/mT.
    """

    d_mhz: float = 2870.0
    b_mt: float = 14.8
    a_n_mhz: float = -2.16
    p_mhz: float = -4.95
    gamma_e: float = -28.02495
    gamma_n: float = 3.0766e-3
    gamma_c: float = 1.07084e-2

    @property
    def nu_c_mhz(self) -> float:
        """Carbon Larmor frequency gamma_C * B."""
        return self.gamma_c * self.b_mt


@dataclass(frozen=True)
class CarbonCoupling:
    """Secular (a_zz) and anisotropic (a_zx) hyperfine couplings in MHz."""

    a_zz: float
    a_zx: float

    def __post_init__(self):
        if not (np.isfinite(self.a_zz) and np.isfinite(self.a_zx)):
            raise ValueError("couplings must be finite")


@dataclass(frozen=True)
class SpinRegister:
    """Electron pseudo-spin plus a list of coupled carbons."""

    params: NVParams = field(default_factory=NVParams)
    couplings: tuple = (CarbonCoupling(-0.152, 0.110),)

    @property
    def n_carbons(self) -> int:
        return len(self.couplings)

    @property
    def dim(self) -> int:
        return 2 ** (self.n_carbons + 1)

    def hamiltonian(self) -> np.ndarray:
        return build_multi_carbon_hamiltonian(self.params, list(self.couplings))

    def drive_operators(self):
        """(drive_x, drive_y) acting on the electron pseudo-spin only."""
        eye = np.eye(2 ** self.n_carbons)
        return np.kron(SPIN_HALF_X, eye), np.kron(SPIN_HALF_Y, eye)


def spin_operators(spin: str):
    """Return (Sx, Sy, Sz) for spin 'half' (dim 2) or 'one' (dim 3)."""
    if spin == "half":
        return SPIN_HALF_X.copy(), SPIN_HALF_Y.copy(), SPIN_HALF_Z.copy()
    if spin == "one":
        return SPIN_ONE_X.copy(), SPIN_ONE_Y.copy(), SPIN_ONE_Z.copy()
    raise ValueError(f"unknown spin kind: {spin!r}")


def tensor_embed(factors) -> np.ndarray:
    """Kronecker product of the given square matrices, in listed order."""
    factors = list(factors)
    if not factors:
        raise ValueError("tensor_embed needs at least one factor")
    out = np.array([[1.0 + 0.0j]])
    for f in factors:
        f = np.asarray(f, dtype=complex)
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise ValueError("all factors must be square matrices")
        out = np.kron(out, f)
    return out


def _single_site(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    ops = [np.eye(op.shape[0] if k == site else 2) for k in range(n_sites)]
    ops[site] = op
    return tensor_embed(ops)


def build_two_qubit_hamiltonian(
    params: NVParams, c: CarbonCoupling
) -> np.ndarray:
    """Rotating-frame electron(pseudo-spin)-carbon Hamiltonian, 4x4, MHz.

    Basis order |0 up>, |0 down>, |-1 up>, |-1 down>; the m_S=0 block
    reduces to the bare -nu_C precession.
    """
    return build_multi_carbon_hamiltonian(params, [c])


def build_multi_carbon_hamiltonian(params: NVParams, couplings) -> np.ndarray:
    """Rotating-frame Hamiltonian of the electron and n carbons, MHz."""
    couplings = list(couplings)
    n = len(couplings)
    if n < 1:
        raise ValueError("need at least one carbon coupling")
    if n > 8:
        raise ValueError("at most 8 carbons supported")
    nu_c = params.nu_c_mhz
    sz_e = np.kron(SPIN_HALF_Z, np.eye(2 ** n))
    h = np.zeros((2 ** (n + 1), 2 ** (n + 1)), dtype=complex)
    for j, c in enumerate(couplings):
        iz = _single_site(SPIN_HALF_Z, j + 1, n + 1)
        ix = _single_site(SPIN_HALF_X, j + 1, n + 1)
        h += (-nu_c - c.a_zz / 2.0) * iz
        h += c.a_zz * sz_e @ iz
        h += c.a_zx * sz_e @ ix
        h += (-c.a_zx / 2.0) * ix
    return h


def build_full_lab_hamiltonian(params: NVParams, c: CarbonCoupling) -> np.ndarray:
    """Lab-frame Hamiltonian of electron (spin 1), N14 (spin 1), C13, MHz.

    Tensor order electron x nitrogen x carbon; 18x18.
    """
    i3 = np.eye(3)
    i2 = np.eye(2)
    sz = tensor_embed([SPIN_ONE_Z, i3, i2])
    izn = tensor_embed([i3, SPIN_ONE_Z, i2])
    izc = tensor_embed([i3, i3, SPIN_HALF_Z])
    ixc = tensor_embed([i3, i3, SPIN_HALF_X])
    b = params.b_mt
    h = (
        params.d_mhz * sz @ sz
        - params.gamma_e * b * sz
        + params.p_mhz * izn @ izn
        - params.gamma_n * b * izn
        - params.gamma_c * b * izc
        + params.a_n_mhz * sz @ izn
        + c.a_zz * sz @ izc
        + c.a_zx * sz @ ixc
    )
    return h


def build_nitrogen_leakage_hamiltonians(
    params: NVParams, rabi_mhz: float, phase_deg: float
):
    """Six-level electron+N14 model on {m_S=0,-1} x {m_N=1,0,-1}.

    Returns (H_free, H_drive) in MHz. The m_N=1 block is resonant; the
    other blocks carry the detuning -A_N*(1-m_N) on the pseudo-spin z
    axis. The microwave drive is nitrogen-state independent.
    """
    if rabi_mhz <= 0:
        raise ValueError("rabi_mhz must be positive")
    detuning = np.diag([-params.a_n_mhz * (1.0 - m) for m in (1.0, 0.0, -1.0)])
    h_free = np.kron(SPIN_HALF_Z, detuning).astype(complex)
    phi = np.deg2rad(phase_deg)
    h_drive = rabi_mhz * np.kron(
        SPIN_HALF_X * np.cos(phi) + SPIN_HALF_Y * np.sin(phi), np.eye(3)
    )
    return h_free, h_drive


def quantization_angles(c: CarbonCoupling, nu_c_mhz: float):
    """(theta_minus, theta_plus) in degrees.

    theta_pm = arctan[a_zx / (a_zz -+ nu_C)] is the tilt of the carbon
    quantization axis in the m_S = -+1 electron manifolds. theta_minus is
    folded to [0, 180); theta_plus is reported on the principal branch.
    """
    den_minus = c.a_zz + nu_c_mhz
    den_plus = c.a_zz - nu_c_mhz
    if c.a_zx == 0.0 and den_minus == 0.0 and den_plus == 0.0:
        raise ValueError("degenerate couplings: quantization axis undefined")
    theta_minus = np.degrees(np.arctan2(c.a_zx, den_minus)) % 360.0
    if theta_minus >= 180.0:
        theta_minus -= 180.0
    if den_plus == 0.0:
        theta_plus = 90.0 if c.a_zx >= 0 else -90.0
    else:
        theta_plus = np.degrees(np.arctan(c.a_zx / den_plus))
    return float(theta_minus), float(theta_plus)


def diagonalizing_transform(theta_plus_deg: float, theta_minus_deg: float) -> np.ndarray:
    """Electron-conditioned carbon rotation, 6x6, on electron(3) x carbon(2).

    |+1><+1| (x) Ry(theta_plus) + |0><0| (x) 1 + |-1><-1| (x) Ry(theta_minus)
    with Ry(theta) = exp(-i theta I_y).
    """
    def ry(theta_deg):
        t = np.deg2rad(theta_deg)
        return np.array(
            [
                [np.cos(t / 2.0), -np.sin(t / 2.0)],
                [np.sin(t / 2.0), np.cos(t / 2.0)],
            ],
            dtype=complex,
        )

    blocks = [ry(theta_plus_deg), np.eye(2, dtype=complex), ry(theta_minus_deg)]
    out = np.zeros((6, 6), dtype=complex)
    for k, blk in enumerate(blocks):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = blk
    return out


def hermitian_propagator(h: np.ndarray, t_us: float) -> np.ndarray:
    """U = exp(-i 2pi H t) via eigendecomposition; H in MHz, t in us."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, HERMITIAN_TOL):
        raise ValueError("propagator requires a Hermitian generator")
    w, v = np.linalg.eigh(h)
    phase = np.exp(-2j * np.pi * w * t_us)
    return (v * phase) @ v.conj().T
