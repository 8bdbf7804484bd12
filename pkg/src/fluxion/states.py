"""Register states: dense vectors, named preparations, Bloch extraction.

Qubit 1 is the most significant bit of the amplitude index; this is the one
ordering constant of the package and is not configurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DENSE_CAP = 14

NORM_TOL = 1e-10


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        r2 = self.x * self.x + self.y * self.y + self.z * self.z
        if r2 > 1.0 + 1e-10:
            raise ValueError(f"Bloch vector norm^2 = {r2} exceeds 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_array(cls, r) -> "BlochVector":
        r = np.asarray(r, dtype=float)
        return cls(float(r[0]), float(r[1]), float(r[2]))

    @classmethod
    def of_state(cls, c0: complex, c1: complex) -> "BlochVector":
        """Bloch vector of the pure qubit state c0|0> + c1|1>."""
        rho01 = c0 * np.conj(c1)
        return cls(2 * rho01.real, -2 * rho01.imag, abs(c0) ** 2 - abs(c1) ** 2)


@dataclass(frozen=True)
class RegisterState:
    """Dense state vector of n_qubits qubits (may be 0 qubits: amplitudes [1])."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_qubits < 0 or self.n_qubits > DENSE_CAP:
            raise ValueError(f"n_qubits must be in 0..{DENSE_CAP}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude count does not match qubit count")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.2e}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "RegisterState":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(np.log2(amps.size))
        if 1 << n != amps.size:
            raise ValueError("amplitude count must be a power of two")
        return cls(n, amps)

    @classmethod
    def computational(cls, n_qubits: int, bits: int = 0) -> "RegisterState":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[bits] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def empty(cls) -> "RegisterState":
        return cls(0, np.array([1.0 + 0j]))


def product_state(input_amplitudes, register: RegisterState) -> RegisterState:
    """Tensor a single input qubit (as qubit 1) with the register (qubits 2..N)."""
    return insert_qubit(register, input_amplitudes, 1)


def insert_qubit(register: RegisterState, input_amplitudes, position: int) -> RegisterState:
    """Insert a single qubit at 1-based `position` among the register's qubits."""
    c = np.asarray(input_amplitudes, dtype=complex).reshape(2)
    if abs(np.linalg.norm(c) - 1.0) > NORM_TOL:
        raise ValueError("input qubit amplitudes not normalized")
    n = register.n_qubits + 1
    if not 1 <= position <= n:
        raise ValueError(f"position {position} out of range 1..{n}")
    before = 1 << (position - 1)
    after = 1 << (n - position)
    reg = register.amplitudes.reshape(before, after)
    full = np.einsum("i,ba->bia", c, reg).reshape(-1)
    return RegisterState(n, full)


def uqcm_preparation_state() -> RegisterState:
    """Two-qubit cloner preparation (2|00> + |01> + |10>)/sqrt(6)."""
    return RegisterState(2, np.array([2.0, 1.0, 1.0, 0.0]) / np.sqrt(6.0))


def psi_plus_state() -> RegisterState:
    """Two-qubit triplet (|01> + |10>)/sqrt(2)."""
    return RegisterState(2, np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0))


def reduced_qubit(state: RegisterState, qubit: int) -> np.ndarray:
    """2x2 reduced density matrix of one qubit."""
    n = state.n_qubits
    if not 1 <= qubit <= n:
        raise ValueError(f"qubit {qubit} out of range 1..{n}")
    before = 1 << (qubit - 1)
    after = 1 << (n - qubit)
    psi = state.amplitudes.reshape(before, 2, after)
    return np.einsum("aib,ajb->ij", psi, psi.conj())


def bloch_of_qubit(state: RegisterState, qubit: int) -> BlochVector:
    rho = reduced_qubit(state, qubit)
    return BlochVector(
        float(2 * rho[0, 1].real),
        float(-2 * rho[0, 1].imag),
        float((rho[0, 0] - rho[1, 1]).real),
    )


# the four tomography inputs: |0>, |1>, |+>, |+i>
TOMOGRAPHY_INPUTS: dict[str, np.ndarray] = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "+i": np.array([1.0, 1.0j]) / np.sqrt(2.0),
}
