"""Heisenberg-picture conjugation through Clifford circuits and circuit fluxes.

Gates are listed in execution order; the evolved operator is U^dag Sigma U
with U = g_m ... g_1, so conjugation walks the gate list from the newest
gate inward.  All mask/phase arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from .flux import FluxMatrix
from .pauli import PHASES, PauliObservable, PauliString, qubit_mask
from .states import RegisterState

GATE_NAMES = ("CNOT", "H", "S", "X", "Y", "Z")


@dataclass(frozen=True, slots=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate {self.name!r}")
        want = 2 if self.name == "CNOT" else 1
        if len(self.qubits) != want:
            raise ValueError(f"{self.name} takes {want} qubit(s)")
        if self.name == "CNOT" and self.qubits[0] == self.qubits[1]:
            raise ValueError("CNOT control and target must differ")


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def h(q: int) -> Gate:
    return Gate("H", (q,))


def s(q: int) -> Gate:
    return Gate("S", (q,))


def x(q: int) -> Gate:
    return Gate("X", (q,))


def y(q: int) -> Gate:
    return Gate("Y", (q,))


def z(q: int) -> Gate:
    return Gate("Z", (q,))


@dataclass(frozen=True)
class CliffordCircuit:
    n_qubits: int
    gates: tuple[Gate, ...]

    def __init__(self, n_qubits: int, gates):
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "gates", tuple(gates))
        for g in self.gates:
            if any(not 1 <= q <= n_qubits for q in g.qubits):
                raise ValueError(f"gate {g} references a qubit outside 1..{n_qubits}")

    def prefix(self, n_gates: int) -> "CliffordCircuit":
        return CliffordCircuit(self.n_qubits, self.gates[:n_gates])

    def inverse(self) -> "CliffordCircuit":
        inv: list[Gate] = []
        for g in reversed(self.gates):
            if g.name == "S":
                # S^-1 = Z S
                inv.extend([Gate("S", g.qubits), Gate("Z", g.qubits)])
            else:
                inv.append(g)
        return CliffordCircuit(self.n_qubits, inv)

    def to_unitary(self) -> np.ndarray:
        """Dense unitary of the whole circuit (test oracle; small n only)."""
        dim = 1 << self.n_qubits
        U = np.eye(dim, dtype=complex)
        for g in self.gates:
            U = _gate_unitary(g, self.n_qubits) @ U
        return U


def copying_stage() -> CliffordCircuit:
    """The four-CNOT copying stage: 1->2, 1->3, 2->1, 3->1."""
    return CliffordCircuit(3, [cnot(1, 2), cnot(1, 3), cnot(2, 1), cnot(3, 1)])


# single-qubit images (letter -> (letter, sign)) under g^dag P g
_SINGLE_IMAGES = {
    "H": {"X": ("Z", 1), "Z": ("X", 1)},
    "S": {"X": ("Y", -1), "Z": ("Z", 1)},
    "X": {"X": ("X", 1), "Z": ("Z", -1)},
    "Y": {"X": ("X", -1), "Z": ("Z", -1)},
    "Z": {"X": ("X", -1), "Z": ("Z", 1)},
}


def _generator_image(gate: Gate, n: int, letter: str, qubit: int) -> PauliString:
    """Image of the X_q or Z_q generator under conjugation by one gate."""
    if gate.name == "CNOT":
        c, t = gate.qubits
        if letter == "X" and qubit == c:
            return PauliString.from_label(n, f"X{c}X{t}")
        if letter == "Z" and qubit == t:
            return PauliString.from_label(n, f"Z{c}Z{t}")
        return PauliString.from_label(n, f"{letter}{qubit}")
    if qubit != gate.qubits[0]:
        return PauliString.from_label(n, f"{letter}{qubit}")
    out, sign = _SINGLE_IMAGES[gate.name][letter]
    return PauliString.from_label(n, f"{out}{qubit}", phase=complex(sign))


def conjugate_string(string: PauliString, gate: Gate) -> PauliString:
    """g^dag string g for a single gate."""
    n = string.n_qubits
    result = PauliString.identity(n)
    for q in range(1, n + 1):
        if string.x_mask & qubit_mask(n, q):
            result = result * _generator_image(gate, n, "X", q)
    for q in range(1, n + 1):
        if string.z_mask & qubit_mask(n, q):
            result = result * _generator_image(gate, n, "Z", q)
    scalar = string.phase * PHASES[(string.x_mask & string.z_mask).bit_count() % 4]
    return PauliString(n, result.x_mask, result.z_mask, result.phase * scalar)


def conjugate(obs: PauliObservable | PauliString, circuit: CliffordCircuit):
    """Heisenberg image of obs through the whole circuit."""
    n = getattr(obs, "n_qubits")
    if n != circuit.n_qubits:
        raise ValueError("qubit count mismatch")
    if isinstance(obs, PauliString):
        out_s = obs
        for gate in reversed(circuit.gates):
            out_s = conjugate_string(out_s, gate)
        return out_s
    out = PauliObservable(n)
    for (x_mask, z_mask), coeff in obs.terms.items():
        evolved = PauliString(n, x_mask, z_mask)
        for gate in reversed(circuit.gates):
            evolved = conjugate_string(evolved, gate)
        out.add_string(evolved, coeff)
    return out


def table1() -> dict[tuple[str, int], list[PauliString]]:
    """Evolved X_i, Z_i for i in 1..3 after each CNOT of the copying stage."""
    stage = copying_stage()
    out: dict[tuple[str, int], list[PauliString]] = {}
    for qubit in (1, 2, 3):
        for letter in ("X", "Z"):
            cells = []
            for j in range(1, 5):
                cells.append(conjugate(PauliString.from_label(3, f"{letter}{qubit}"), stage.prefix(j)))
            out[(letter, qubit)] = cells
    return out


def _drop_qubit(mask: int, n: int, qubit: int) -> int:
    low = mask & ((1 << (n - qubit)) - 1)
    high = mask >> (n - qubit + 1)
    return (high << (n - qubit)) | low


def flux_from_observable(
    evolved: PauliObservable | PauliString,
    register: RegisterState,
    input_qubit: int,
    target_letter: str,
) -> np.ndarray:
    """One FluxMatrix row: coefficients of the input's X, Y, Z, I components.

    Groups the evolved observable's terms by the Pauli letter on the input
    qubit and weights each residual string by its register expectation.
    """
    if isinstance(evolved, PauliString):
        obs = PauliObservable(evolved.n_qubits)
        obs.add_string(evolved)
    else:
        obs = evolved
    n = obs.n_qubits
    if register.n_qubits != n - 1:
        raise ValueError("register must cover every qubit except the input")
    m = qubit_mask(n, input_qubit)
    row = np.zeros(4, dtype=complex)
    cols = {(0, 0): 3, (1, 0): 0, (1, 1): 1, (0, 1): 2}  # I, X, Y, Z columns
    for (x_mask, z_mask), coeff in obs.terms.items():
        col = cols[(1 if x_mask & m else 0, 1 if z_mask & m else 0)]
        residual = PauliString(n - 1, _drop_qubit(x_mask, n, input_qubit), _drop_qubit(z_mask, n, input_qubit))
        amps = register.amplitudes
        row[col] += coeff * np.vdot(amps, residual.apply(amps))
    if np.abs(row.imag).max() > 1e-10:
        raise AssertionError("flux row has a non-real component")
    return row.real


def flux_matrix(
    circuit: CliffordCircuit,
    register: RegisterState,
    input_qubit: int,
    target_qubit: int,
    time_label: float | str = "",
) -> FluxMatrix:
    rows = []
    for letter in "XYZ":
        evolved = conjugate(PauliString.from_label(circuit.n_qubits, f"{letter}{target_qubit}"), circuit)
        rows.append(flux_from_observable(evolved, register, input_qubit, letter))
    return FluxMatrix(target_qubit, time_label, np.array(rows))


def _gate_unitary(gate: Gate, n: int) -> np.ndarray:
    dim = 1 << n
    if gate.name == "CNOT":
        c, t = gate.qubits
        cb, tb = n - c, n - t
        U = np.zeros((dim, dim), dtype=complex)
        for i in range(dim):
            j = i ^ (1 << tb) if (i >> cb) & 1 else i
            U[j, i] = 1.0
        return U
    mats = {
        "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
        "S": np.array([[1, 0], [0, 1j]], dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    q = gate.qubits[0]
    U = np.eye(1, dtype=complex)
    for pos in range(1, n + 1):
        U = np.kron(U, mats[gate.name] if pos == q else np.eye(2, dtype=complex))
    return U


# --- preparation-state optimization ---------------------------------------

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class PreparationResult:
    state: RegisterState
    amplitudes: np.ndarray
    flux: float
    constraint_residual: float


def _diagonal_flux_forms(targets=(2, 3)) -> dict[tuple[str, int], PauliString]:
    """Residual register strings whose expectations give the diagonal fluxes.

    Each evolved target operator of the copying stage is a single Pauli
    string whose input-qubit letter matches the target letter, so the
    diagonal flux equals one register expectation.
    """
    stage = copying_stage()
    forms = {}
    for target in targets:
        for letter in "XYZ":
            evolved = conjugate(PauliString.from_label(3, f"{letter}{target}"), stage)
            if evolved.letter(1) != letter or evolved.phase != 1:
                raise AssertionError("copying stage lost its diagonal flux structure")
            residual = PauliString(
                2, _drop_qubit(evolved.x_mask, 3, 1), _drop_qubit(evolved.z_mask, 3, 1)
            )
            forms[(letter, target)] = residual
    return forms


def optimize_preparation(constraint_set: str, seeds: int = 12) -> PreparationResult:
    """Best real-amplitude register preparation for the copying stage.

    constraint_set "symmetric-universal": equal fluxes on both output qubits,
    independent of the Pauli letter, maximized.  "fully-biased": unit flux to
    qubit 2.  The feasible sets are lower-dimensional with rank-deficient
    constraint Jacobians, so a staged quadratic penalty steers seeded starts
    into the right basin and a least-squares polish lands on the constraint
    manifold; the best feasible candidate wins.
    """
    if constraint_set not in ("symmetric-universal", "fully-biased"):
        raise ValueError(f"unknown constraint set {constraint_set!r}")
    forms = _diagonal_flux_forms()

    def fluxes(v: np.ndarray) -> dict[tuple[str, int], float]:
        return {
            key: float(np.vdot(v, s.apply(v.astype(complex))).real)
            for key, s in forms.items()
        }

    if constraint_set == "symmetric-universal":

        def residual(v):
            f = fluxes(v)
            return np.array(
                [
                    v @ v - 1.0,
                    f[("X", 2)] - f[("X", 3)],
                    f[("Y", 2)] - f[("Y", 3)],
                    f[("Z", 2)] - f[("Z", 3)],
                    f[("X", 2)] - f[("Y", 2)],
                    f[("Y", 2)] - f[("Z", 2)],
                ]
            )

        def score(v):
            return float(np.mean(list(fluxes(v).values())))

    else:

        def residual(v):
            f = fluxes(v)
            return np.array(
                [
                    v @ v - 1.0,
                    f[("X", 2)] - 1.0,
                    f[("Y", 2)] - 1.0,
                    f[("Z", 2)] - 1.0,
                ]
            )

        def score(v):
            f = fluxes(v)
            return float((f[("X", 2)] + f[("Y", 2)] + f[("Z", 2)]) / 3.0)

    best = None
    best_infeasible = None
    for seed in range(seeds):
        v = np.random.default_rng(seed).normal(size=4)
        v /= np.linalg.norm(v)
        for mu in (10.0, 100.0, 1000.0):
            res = minimize(
                lambda w: -score(w) + mu * float(residual(w) @ residual(w)),
                v,
                method="BFGS",
                options={"maxiter": 400, "gtol": 1e-12},
            )
            v = res.x
        polish = least_squares(residual, v, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        v = polish.x
        feas = float(np.abs(residual(v)).max())
        if feas < FEASIBILITY_TOL:
            sc = score(v)
            if best is None or sc > best[0]:
                best = (sc, v, feas)
        elif best_infeasible is None or feas < best_infeasible[2]:
            best_infeasible = (score(v), v, feas)
    if best is None:
        sc, v, feas = best_infeasible
        raise RuntimeError(
            f"preparation optimizer did not converge; best residual {feas:.2e} "
            f"at amplitudes {np.round(v, 6).tolist()} with flux {sc:.6f}"
        )
    sc, v, feas = best
    v = v / np.linalg.norm(v)
    lead = v[np.nonzero(np.abs(v) > 1e-8)[0][0]]
    v = v * np.sign(lead)
    return PreparationResult(RegisterState(2, v.astype(complex)), v, sc, feas)
