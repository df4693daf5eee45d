"""
Dense quantum simulation for desk-scale circuits.

States are numpy arrays reshaped to one axis per qubit, qubit 0 being the most
significant bit of the basis index (bitstrings read left to right). Pure states
are evolved by tensor contraction with the gate unitary; density matrices carry
one row and one column axis per qubit and evolve as U rho U^dagger. Noise is a
single-qubit depolarizing channel applied to every qubit a gate touched, right
after that gate.
"""
from dataclasses import dataclass
from os import PathLike

import numpy as np
import polars as pl

from .errors import SimulationError
from .globalvars import MAX_DENSITY_QUBITS, MAX_PURE_QUBITS, STATE_ATOL, UNITARY_ATOL

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class GateOp:
    """
    A unitary acting on an ordered list of qubits.

    Parameters
    ----------
    unitary : np.ndarray
        2^w x 2^w matrix; row/column bits follow the order of `targets`.
    targets : tuple[int, ...]
        w distinct qubit indices.
    name : str
    """
    unitary: np.ndarray
    targets: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        w = len(self.targets)
        if w == 0 or len(set(self.targets)) != w or min(self.targets) < 0:
            raise SimulationError(f"gate {self.name!r} needs distinct non-negative targets, got {self.targets}")
        if self.unitary.shape != (2**w, 2**w):
            raise SimulationError(f"gate {self.name!r} has shape {self.unitary.shape} for {w} targets")
        if not np.allclose(self.unitary.conj().T @ self.unitary, np.eye(2**w), atol=UNITARY_ATOL):
            raise SimulationError(f"gate {self.name!r} is not unitary")

    @property
    def width(self) -> int:
        return len(self.targets)


def single(matrix: np.ndarray, qubit: int, name: str = "") -> GateOp:
    return GateOp(np.asarray(matrix, dtype=complex), (qubit,), name)


def diagonal(phases: np.ndarray, targets: tuple[int, ...], name: str = "") -> GateOp:
    return GateOp(np.diag(np.asarray(phases, dtype=complex)), tuple(targets), name)


@dataclass(eq=False)
class QuantumState:
    amplitudes: np.ndarray

    def __post_init__(self):
        n = self.amplitudes.size.bit_length() - 1
        if self.amplitudes.ndim != 1 or self.amplitudes.size != 2**n:
            raise SimulationError("amplitude vector length must be a power of two")
        if n > MAX_PURE_QUBITS:
            raise SimulationError(f"pure-state simulation is capped at {MAX_PURE_QUBITS} qubits")
        if abs(np.linalg.norm(self.amplitudes) - 1) > STATE_ATOL:
            raise SimulationError("amplitude vector must have unit norm")

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def zero(cls, n: int) -> "QuantumState":
        amplitudes = np.zeros(2**n, dtype=complex)
        amplitudes[0] = 1.0
        return cls(amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        dim = self.matrix.shape[0]
        n = dim.bit_length() - 1
        if self.matrix.shape != (dim, dim) or dim != 2**n:
            raise SimulationError("density matrix must be square with power-of-two dimension")
        if n > MAX_DENSITY_QUBITS:
            raise SimulationError(f"density-matrix simulation is capped at {MAX_DENSITY_QUBITS} qubits")
        if abs(np.trace(self.matrix) - 1) > STATE_ATOL:
            raise SimulationError("density matrix must have unit trace")
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=STATE_ATOL):
            raise SimulationError("density matrix must be Hermitian")

    @property
    def n(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    @classmethod
    def zero(cls, n: int) -> "DensityMatrix":
        matrix = np.zeros((2**n, 2**n), dtype=complex)
        matrix[0, 0] = 1.0
        return cls(matrix)

    @classmethod
    def from_state(cls, state: QuantumState) -> "DensityMatrix":
        return cls(np.outer(state.amplitudes, state.amplitudes.conj()))

    def is_valid(self, atol: float = 1e-10, eig_tol: float = 1e-9) -> bool:
        """Hermitian, unit trace and positive semidefinite within tolerance."""
        m = self.matrix
        return (np.allclose(m, m.conj().T, atol=atol)
                and abs(np.trace(m) - 1) < atol
                and np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -eig_tol)


@dataclass(frozen=True)
class NoiseModel:
    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise SimulationError(f"depolarizing probability {self.p} outside [0, 1]")


def _contract(tensor: np.ndarray, unitary: np.ndarray, axes: list[int]) -> np.ndarray:
    w = len(axes)
    u = unitary.reshape([2] * (2 * w))
    out = np.tensordot(u, tensor, axes=(list(range(w, 2 * w)), axes))
    return np.moveaxis(out, list(range(w)), axes)


def _check_targets(gate: GateOp, n: int) -> None:
    if max(gate.targets) >= n:
        raise SimulationError(f"gate {gate.name!r} targets {gate.targets} on a {n}-qubit register")


def _sandwich(matrix: np.ndarray, op: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    """op rho op^dagger restricted to `qubits`, on a 2^n x 2^n matrix."""
    rho = matrix.reshape([2] * (2 * n))
    rho = _contract(rho, op, qubits)
    rho = _contract(rho, op.conj(), [q + n for q in qubits])
    return rho.reshape(2**n, 2**n)


def apply_gate(state: QuantumState | DensityMatrix, gate: GateOp) -> QuantumState | DensityMatrix:
    """Pure state: psi -> U psi. Density matrix: rho -> U rho U^dagger."""
    n = state.n
    _check_targets(gate, n)
    targets = list(gate.targets)
    if isinstance(state, QuantumState):
        psi = _contract(state.amplitudes.reshape([2] * n), gate.unitary, targets)
        return QuantumState(psi.reshape(-1))
    return DensityMatrix(_sandwich(state.matrix, gate.unitary, targets, n))


def depolarizing_kraus(p: float) -> list[np.ndarray]:
    """Kraus operators of (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z)."""
    NoiseModel(p)
    return [np.sqrt(1 - p) * I2, np.sqrt(p / 3) * X, np.sqrt(p / 3) * Y, np.sqrt(p / 3) * Z]


def apply_channel(rho: DensityMatrix, kraus: list[np.ndarray], qubit: int) -> DensityMatrix:
    n = rho.n
    if not 0 <= qubit < n:
        raise SimulationError(f"qubit {qubit} outside a {n}-qubit register")
    out = sum(_sandwich(rho.matrix, K, [qubit], n) for K in kraus)
    return DensityMatrix(out)


def apply_depolarizing(rho: DensityMatrix, qubit: int, p: float) -> DensityMatrix:
    if p == 0:
        return rho
    return apply_channel(rho, depolarizing_kraus(p), qubit)


def choi_matrix(kraus: list[np.ndarray]) -> np.ndarray:
    """Choi matrix sum_ij |i><j| (x) E(|i><j|) of a single-qubit channel."""
    choi = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            e_ij = np.zeros((2, 2), dtype=complex)
            e_ij[i, j] = 1.0
            image = sum(K @ e_ij @ K.conj().T for K in kraus)
            choi += np.kron(e_ij, image)
    return choi


def measure_probabilities(state: QuantumState | DensityMatrix) -> np.ndarray:
    """Computational-basis outcome probabilities, indexed by basis state."""
    if isinstance(state, QuantumState):
        return np.abs(state.amplitudes) ** 2
    return np.clip(np.real(np.diag(state.matrix)), 0.0, None)


def run_circuit(gates: list[GateOp], n: int, noise: NoiseModel | None = None) -> np.ndarray:
    """
    Run `gates` on |0...0> and return the outcome probabilities.

    Without noise the pure-state path is used. With noise the density-matrix path
    applies the depolarizing channel to every qubit a gate touched, after that gate.
    """
    if noise is None:
        state = QuantumState.zero(n)
        for gate in gates:
            state = apply_gate(state, gate)
        return measure_probabilities(state)

    rho = DensityMatrix.zero(n)
    for gate in gates:
        rho = apply_gate(rho, gate)
        for qubit in gate.targets:
            rho = apply_depolarizing(rho, qubit, noise.p)
    return measure_probabilities(rho)


def bitstring(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def sample_counts(probabilities: np.ndarray, shots: int, seed: int | None = None) -> dict[str, int]:
    """Multinomial sample of `shots` measurements from an exact distribution."""
    n = probabilities.size.bit_length() - 1
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probabilities / probabilities.sum())
    return {bitstring(i, n): int(c) for i, c in enumerate(counts) if c}


def save_probabilities(probabilities: np.ndarray, path: str | PathLike, float_precision: int = 12) -> None:
    """Write `bitstring,probability` rows."""
    n = probabilities.size.bit_length() - 1
    pl.DataFrame({
        "bitstring": [bitstring(i, n) for i in range(probabilities.size)],
        "probability": probabilities.astype(float),
    }).write_csv(path, float_precision=float_precision)
