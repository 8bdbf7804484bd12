"""Exact algebra of N-qubit Pauli strings and sparse Pauli observables.

Bit convention used everywhere in this package: qubit 1 is the most
significant bit, so qubit j of an n-qubit system owns mask bit (n - j).
A string is stored as the Hermitian word  i^{|x & z|} X^x Z^z  times an
explicit phase in {1, i, -1, -i}; a qubit with both mask bits set carries
Y = i X Z.  Phase +-1 therefore means the operator is Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PHASES = (1 + 0j, 1j, -1 + 0j, -1j)

# observables drop coefficients below this after arithmetic
PRUNE_TOL = 1e-14

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_LETTER_BITS = {v: k for k, v in _LETTERS.items()}


def qubit_mask(n_qubits: int, qubit: int) -> int:
    if not 1 <= qubit <= n_qubits:
        raise ValueError(f"qubit {qubit} out of range 1..{n_qubits}")
    return 1 << (n_qubits - qubit)


@dataclass(frozen=True, slots=True)
class PauliString:
    """A tensor product of single-qubit Paulis with a global phase."""

    n_qubits: int
    x_mask: int
    z_mask: int
    phase: complex = 1 + 0j

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be nonnegative")
        top = 1 << self.n_qubits
        if not (0 <= self.x_mask < top and 0 <= self.z_mask < top):
            raise ValueError("mask out of range for qubit count")
        if self.phase not in PHASES:
            raise ValueError(f"phase must be a fourth root of unity, got {self.phase}")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, n_qubits: int, label: str, phase: complex = 1 + 0j) -> "PauliString":
        """Build from e.g. "X1 Z3" or "X1X2X3" (1-based qubit numbers)."""
        if label.replace(" ", "") in ("", "I"):
            return cls(n_qubits, 0, 0, phase)
        x = z = 0
        token = ""
        for ch in label.replace(" ", "") + "#":
            if ch.isdigit():
                token += ch
                continue
            if token:
                letter, num = token[0], int(token[1:])
                bx, bz = _LETTER_BITS[letter]
                m = qubit_mask(n_qubits, num)
                if (x | z) & m:
                    raise ValueError(f"duplicate qubit {num} in {label!r}")
                x |= m * bx
                z |= m * bz
            token = "" if ch == "#" else ch
        return cls(n_qubits, x, z, phase)

    def letter(self, qubit: int) -> str:
        m = qubit_mask(self.n_qubits, qubit)
        return _LETTERS[(1 if self.x_mask & m else 0, 1 if self.z_mask & m else 0)]

    def label(self) -> str:
        """Human-readable form, e.g. "-X1Y2"; identity is "I"."""
        word = "".join(
            f"{self.letter(q)}{q}" for q in range(1, self.n_qubits + 1) if self.letter(q) != "I"
        )
        sign = {1 + 0j: "", 1j: "i", -1 + 0j: "-", -1j: "-i"}[self.phase]
        return sign + (word or "I")

    @property
    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    def multiply(self, other: "PauliString") -> "PauliString":
        """Group product self * other; phase stays a fourth root of unity."""
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        cx = self.x_mask ^ other.x_mask
        cz = self.z_mask ^ other.z_mask
        # i-exponent from recanonicalizing X^a Z^b words and commuting Z past X
        k = (
            (self.x_mask & self.z_mask).bit_count()
            + (other.x_mask & other.z_mask).bit_count()
            - (cx & cz).bit_count()
            + 2 * (self.z_mask & other.x_mask).bit_count()
        )
        return PauliString(self.n_qubits, cx, cz, self.phase * other.phase * PHASES[k % 4])

    __mul__ = multiply

    def commutes(self, other: "PauliString") -> bool:
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        sym = (self.x_mask & other.z_mask).bit_count() + (self.z_mask & other.x_mask).bit_count()
        return sym % 2 == 0

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Apply to a dense state vector (length 2^n)."""
        dim = 1 << self.n_qubits
        if amplitudes.shape != (dim,):
            raise ValueError("state dimension mismatch")
        idx = np.arange(dim) ^ self.x_mask
        signs = 1 - 2 * (np.bitwise_count(idx & self.z_mask).astype(np.int64) & 1)
        scale = self.phase * PHASES[(self.x_mask & self.z_mask).bit_count() % 4]
        return scale * signs * amplitudes[idx]

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        out = np.empty((dim, dim), dtype=complex)
        for col in range(dim):
            e = np.zeros(dim, dtype=complex)
            e[col] = 1.0
            out[:, col] = self.apply(e)
        return out


@dataclass(slots=True)
class PauliObservable:
    """Sparse real/complex combination of Hermitian Pauli words.

    Terms map (x_mask, z_mask) to a coefficient; the phase of each word is
    the canonical i^{|x & z|} factor, so a real-coefficient observable is
    Hermitian.  Stored zero coefficients are pruned below PRUNE_TOL.
    """

    n_qubits: int
    terms: dict[tuple[int, int], complex] = field(default_factory=dict)

    @classmethod
    def from_strings(cls, strings: list[PauliString]) -> "PauliObservable":
        if not strings:
            raise ValueError("need at least one string")
        obs = cls(strings[0].n_qubits)
        for s in strings:
            obs.add_string(s)
        return obs

    def add_string(self, s: PauliString, coefficient: complex = 1.0) -> None:
        if s.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        key = (s.x_mask, s.z_mask)
        self.terms[key] = self.terms.get(key, 0.0) + coefficient * s.phase
        if abs(self.terms[key]) < PRUNE_TOL:
            del self.terms[key]

    def copy(self) -> "PauliObservable":
        return PauliObservable(self.n_qubits, dict(self.terms))

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        dim = 1 << self.n_qubits
        if amplitudes.shape != (dim,):
            raise ValueError("state dimension mismatch")
        out = np.zeros(dim, dtype=complex)
        idx_base = np.arange(dim)
        for (x, z), coeff in self.terms.items():
            idx = idx_base ^ x
            signs = 1 - 2 * (np.bitwise_count(idx & z).astype(np.int64) & 1)
            out += (coeff * PHASES[(x & z).bit_count() % 4]) * signs * amplitudes[idx]
        return out

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        out = np.empty((dim, dim), dtype=complex)
        for col in range(dim):
            e = np.zeros(dim, dtype=complex)
            e[col] = 1.0
            out[:, col] = self.apply(e)
        return out


def multiply(a: PauliString, b: PauliString) -> PauliString:
    return a.multiply(b)


def commutes(a: PauliString, b: PauliString) -> bool:
    return a.commutes(b)


def expectation(obs: PauliObservable | PauliString, state) -> complex:
    """<state|obs|state> for a normalized RegisterState (or raw amplitudes)."""
    amps = np.asarray(getattr(state, "amplitudes", state), dtype=complex)
    n = obs.n_qubits
    if amps.shape != (1 << n,):
        raise ValueError("qubit count mismatch between observable and state")
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.2e}")
    return complex(np.vdot(amps, obs.apply(amps)))


CHI_CAP = 8  # register qubits; 4^8 basis strings

# canonical digit order for the chi basis
CHI_LETTERS = "IXYZ"


def chi_vector(register_state) -> np.ndarray:
    """Expectations of every register-basis Pauli word over the register state.

    Entry k expands k in base 4 with the register's first qubit as the most
    significant digit and digits (I, X, Y, Z) = (0, 1, 2, 3).
    """
    m = register_state.n_qubits
    if m > CHI_CAP:
        raise ValueError(f"register has {m} qubits; chi_vector cap is {CHI_CAP}")
    amps = register_state.amplitudes
    out = np.empty(4 ** m, dtype=complex)
    for k in range(4 ** m):
        x = z = 0
        rest = k
        for q in range(m, 0, -1):
            digit = rest % 4
            rest //= 4
            bx, bz = _LETTER_BITS[CHI_LETTERS[digit]]
            mask = 1 << (m - q)
            x |= mask * bx
            z |= mask * bz
        s = PauliString(m, x, z)
        out[k] = np.vdot(amps, s.apply(amps))
    return out
