"""Markovian open-system evolution for small registers.

Standard-form Lindblad generator with per-qubit amplitude damping (optionally
thermal) and pure dephasing.  Density matrices are integrated directly with
adaptive high-order stepping; an explicit superoperator builder is kept as a
cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .dense import SpinHamiltonian
from .flux import FluxMatrix, solve_affine
from .pauli import PauliObservable, PauliString
from .states import TOMOGRAPHY_INPUTS, BlochVector, RegisterState, insert_qubit

OPEN_QUBIT_CAP = 8
TRACE_TOL = 1e-9
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = 1e-8
RTOL = 1e-10
ATOL = 1e-12

_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex).copy()
        dim = 1 << self.n_qubits
        if arr.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix")
        if abs(np.trace(arr).real - 1.0) > TRACE_TOL or abs(np.trace(arr).imag) > TRACE_TOL:
            raise ValueError(f"trace {np.trace(arr)} is not 1")
        if np.abs(arr - arr.conj().T).max() > HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian")
        if np.linalg.eigvalsh(arr).min() < -POSITIVITY_TOL:
            raise ValueError("matrix has a significantly negative eigenvalue")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_state(cls, state: RegisterState) -> "DensityMatrix":
        v = state.amplitudes
        return cls(state.n_qubits, np.outer(v, v.conj()))

    def expectation(self, obs: PauliObservable | PauliString) -> float:
        val = complex(np.trace(obs.to_matrix() @ self.entries))
        if abs(val.imag) > 1e-8:
            raise AssertionError(f"non-real expectation {val}")
        return val.real

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


def reduced_qubit(rho: DensityMatrix, qubit: int) -> np.ndarray:
    n = rho.n_qubits
    if not 1 <= qubit <= n:
        raise ValueError("qubit index out of range")
    before = 1 << (qubit - 1)
    after = 1 << (n - qubit)
    r = rho.entries.reshape(before, 2, after, before, 2, after)
    return np.einsum("aibajb->ij", r)


def bloch_of_qubit(rho: DensityMatrix, qubit: int) -> BlochVector:
    r = reduced_qubit(rho, qubit)
    return BlochVector(
        float(2 * r[0, 1].real), float(-2 * r[0, 1].imag), float((r[0, 0] - r[1, 1]).real)
    )


@dataclass(frozen=True)
class LindbladSpec:
    """Per-qubit rates; damping relaxes toward the ground state.

    Dephasing enters through a sigma_z jump at rate dephasing_rate, giving
    coherences an extra decay of twice that rate on top of the damping
    contribution.
    """

    damping_rate: float
    dephasing_rate: float
    n_bar: float = 0.0
    hamiltonian: SpinHamiltonian | None = None

    def __post_init__(self):
        if self.damping_rate < 0 or self.dephasing_rate < 0 or self.n_bar < 0:
            raise ValueError("rates and occupation must be >= 0")

    def jump_operators(self, n_qubits: int) -> list[np.ndarray]:
        ops = []
        for q in range(1, n_qubits + 1):
            if self.damping_rate > 0:
                ops.append(np.sqrt(self.damping_rate * (self.n_bar + 1)) * _embed(_SIGMA_MINUS, q, n_qubits))
                if self.n_bar > 0:
                    ops.append(np.sqrt(self.damping_rate * self.n_bar) * _embed(_SIGMA_PLUS, q, n_qubits))
            if self.dephasing_rate > 0:
                ops.append(np.sqrt(self.dephasing_rate) * _embed(_SIGMA_Z, q, n_qubits))
        return ops

    def hamiltonian_matrix(self, n_qubits: int) -> np.ndarray:
        if self.hamiltonian is None:
            dim = 1 << n_qubits
            return np.zeros((dim, dim), dtype=complex)
        if self.hamiltonian.n_qubits != n_qubits:
            raise ValueError("Hamiltonian qubit count mismatch")
        return self.hamiltonian.to_matrix()


def _embed(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for pos in range(1, n + 1):
        out = np.kron(out, op if pos == qubit else np.eye(2, dtype=complex))
    return out


def _generator_pieces(spec: LindbladSpec, n: int):
    H = spec.hamiltonian_matrix(n)
    jumps = spec.jump_operators(n)
    anticomm = sum((L.conj().T @ L for L in jumps), np.zeros_like(H))
    return H, jumps, anticomm


def evolve_density(rho0: DensityMatrix, spec: LindbladSpec, t: float) -> DensityMatrix:
    n = rho0.n_qubits
    if n > OPEN_QUBIT_CAP:
        raise ValueError(f"open evolution capped at {OPEN_QUBIT_CAP} qubits")
    if t == 0:
        return rho0
    H, jumps, anticomm = _generator_pieces(spec, n)
    dim = 1 << n

    def rhs(_, y):
        rho = y.reshape(dim, dim)
        out = -1j * (H @ rho - rho @ H) - 0.5 * (anticomm @ rho + rho @ anticomm)
        for L in jumps:
            out += L @ rho @ L.conj().T
        return out.ravel()

    sol = solve_ivp(
        rhs,
        (0.0, float(t)),
        rho0.entries.ravel().astype(complex),
        method="DOP853",
        rtol=RTOL,
        atol=ATOL,
    )
    if not sol.success:
        raise RuntimeError(f"density-matrix integration failed: {sol.message}")
    rho = sol.y[:, -1].reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)  # remove integrator roundoff asymmetry
    return DensityMatrix(n, rho)


def open_flux_tomography(
    spec: LindbladSpec,
    t: float,
    input_qubit: int,
    register: RegisterState,
    target_qubit: int,
) -> FluxMatrix:
    """Four-input affine reconstruction under open evolution.

    Incoherent decay shows up in the identity column, which collects the
    input-independent drift of the target Bloch vector.
    """
    n = register.n_qubits + 1
    if n > OPEN_QUBIT_CAP:
        raise ValueError(f"open evolution capped at {OPEN_QUBIT_CAP} qubits")
    outputs = {}
    for key, amps in TOMOGRAPHY_INPUTS.items():
        full = insert_qubit(register, amps, input_qubit)
        rho = evolve_density(DensityMatrix.from_state(full), spec, t)
        outputs[key] = bloch_of_qubit(rho, target_qubit).as_array()
    return solve_affine(outputs, target_qubit, t)


def expectation_trajectory(
    spec: LindbladSpec,
    obs: PauliObservable | PauliString,
    rho0: DensityMatrix,
    t_grid,
) -> np.ndarray:
    """Tr[obs rho(t)] sampled on an ascending time grid, single integration."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        return np.array([])
    if (np.diff(t_grid) < 0).any():
        raise ValueError("time grid must be ascending")
    n = rho0.n_qubits
    if n > OPEN_QUBIT_CAP:
        raise ValueError(f"open evolution capped at {OPEN_QUBIT_CAP} qubits")
    H, jumps, anticomm = _generator_pieces(spec, n)
    dim = 1 << n
    M = obs.to_matrix()

    def rhs(_, y):
        rho = y.reshape(dim, dim)
        out = -1j * (H @ rho - rho @ H) - 0.5 * (anticomm @ rho + rho @ anticomm)
        for L in jumps:
            out += L @ rho @ L.conj().T
        return out.ravel()

    start, end = 0.0, float(t_grid[-1])
    eval_grid = t_grid
    if end == 0.0:
        return np.full(t_grid.size, float(np.trace(M @ rho0.entries).real))
    sol = solve_ivp(
        rhs,
        (start, end),
        rho0.entries.ravel().astype(complex),
        method="DOP853",
        rtol=RTOL,
        atol=ATOL,
        t_eval=eval_grid,
    )
    if not sol.success:
        raise RuntimeError(f"density-matrix integration failed: {sol.message}")
    values = np.empty(t_grid.size)
    for k in range(t_grid.size):
        rho = sol.y[:, k].reshape(dim, dim)
        val = complex(np.trace(M @ rho))
        if abs(val.imag) > 1e-7:
            raise AssertionError(f"non-real expectation {val}")
        values[k] = val.real
    return values


def superoperator(spec: LindbladSpec, n_qubits: int) -> np.ndarray:
    """Dense generator on row-major vectorized density matrices (oracle use)."""
    H, jumps, anticomm = _generator_pieces(spec, n_qubits)
    dim = 1 << n_qubits
    eye = np.eye(dim, dtype=complex)
    L_total = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for L in jumps:
        L_total += np.kron(L, L.conj())
    L_total -= 0.5 * (np.kron(anticomm, eye) + np.kron(eye, anticomm.T))
    return L_total
