"""
Grover search variants on the dense simulator.

Three procedures are built as gate lists for `qsim.run_circuit`:

- original Grover: H^n followed by the optimal number of (phase flip, diffusion)
  iterations,
- modified Grover: the exact phase-matching search over all n qubits, where both
  reflections become phase rotations by an angle chosen so the target is reached
  with certainty,
- DEGA: the register is split into floor(n/2) segments of width 2 (the last one
  of width 3 when n is odd) and every segment runs its own small exact search.

Gate counting treats every `GateOp` as one elementary gate: single-qubit H gates
and one multi-controlled diagonal per oracle or reflection.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from joblib import Parallel, delayed

from .errors import ConfigurationError, IndexRangeError, SimulationError
from .globalvars import MAX_DENSITY_QUBITS, MAX_PURE_QUBITS
from .qsim import GateOp, H, NoiseModel, bitstring, diagonal, run_circuit, sample_counts, single

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TargetSpec:
    """
    A search problem with one marked item.

    Parameters
    ----------
    n : int
        Number of qubits, at least 2.
    tau : str
        The marked n-bit string, qubit 0 first.
    """
    n: int
    tau: str

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"a search needs at least 2 qubits, got n = {self.n}")
        if len(self.tau) != self.n or set(self.tau) - {"0", "1"}:
            raise ConfigurationError(f"tau {self.tau!r} is not a {self.n}-bit string")

    @property
    def index(self) -> int:
        return int(self.tau, 2)

    def f(self, x: int) -> bool:
        return x == self.index


class Segment(NamedTuple):
    start: int
    width: int
    tau: str

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.start + self.width))


@dataclass(frozen=True)
class SubfunctionPlan:
    segments: tuple[Segment, ...]

    @property
    def tau(self) -> str:
        return "".join(s.tau for s in self.segments)


def partition(spec: TargetSpec) -> SubfunctionPlan:
    """Cut the register into floor(n/2) contiguous segments, all of width 2 but the last (2 or 3)."""
    count = spec.n // 2
    segments = []
    for i in range(count):
        start = 2 * i
        width = 2 if i < count - 1 else spec.n - start
        segments.append(Segment(start, width, spec.tau[start:start + width]))
    return SubfunctionPlan(tuple(segments))


def evaluate_subfunction(spec: TargetSpec, segment: Segment, m: int) -> bool:
    """
    g(m) = OR over every assignment y of the bits outside `segment` of f(x),
    where x carries m on the segment's qubits and y elsewhere.
    """
    rest = spec.n - segment.width
    shift = spec.n - segment.start - segment.width
    for y in range(2**rest):
        high, low = divmod(y, 2**shift)
        x = (high << (segment.width + shift)) | (m << shift) | low
        if spec.f(x):
            return True
    return False


def subfunction_solutions(spec: TargetSpec, plan: SubfunctionPlan | None = None) -> list[list[str]]:
    """Every satisfying local input of every g_i, as bitstrings."""
    plan = plan or partition(spec)
    return [[bitstring(m, s.width) for m in range(2**s.width) if evaluate_subfunction(spec, s, m)]
            for s in plan.segments]


def _targets(width: int, targets: tuple[int, ...] | None) -> tuple[int, ...]:
    return tuple(range(width)) if targets is None else tuple(targets)


def phase_flip_oracle(width: int, tau: str, targets: tuple[int, ...] | None = None) -> GateOp:
    """diag(+1, ..., -1 at tau, ..., +1)."""
    return phase_rotation_oracle(width, tau, np.pi, targets, name=f"U_{tau}")


def phase_rotation_oracle(width: int, tau: str, phi: float,
                          targets: tuple[int, ...] | None = None, name: str = "") -> GateOp:
    """diag(1, ..., e^{i phi} at tau, ..., 1)."""
    if len(tau) != width:
        raise ConfigurationError(f"tau {tau!r} does not have width {width}")
    phases = np.ones(2**width, dtype=complex)
    phases[int(tau, 2)] = np.exp(1j * phi)
    return diagonal(phases, _targets(width, targets), name or f"R_{tau}")


def zero_reflection(width: int, phi: float = np.pi, targets: tuple[int, ...] | None = None) -> GateOp:
    """-R_0 = -(I + (e^{i phi} - 1)|0><0|); phi = pi gives -U_0 = 2|0><0| - I."""
    phases = -np.ones(2**width, dtype=complex)
    phases[0] = -np.exp(1j * phi)
    return diagonal(phases, _targets(width, targets), "-R_0")


def hadamards(qubits: tuple[int, ...]) -> list[GateOp]:
    return [single(H, q, "H") for q in qubits]


def compute_phi() -> float:
    """Phase for the two exact iterations of a 3-qubit search (about 2.1269 rad)."""
    return exact_phase(3)[1]


def exact_phase(n: int) -> tuple[int, float]:
    """
    Iteration count and phase of the exact phase-matching search on n qubits.

    theta = arcsin(2^{-n/2}); J = floor((pi/2 - theta) / (2 theta)); J + 1 iterations
    with phi = 2 arcsin(sin(pi / (4J + 6)) / sin(theta)).
    """
    theta = np.arcsin(2 ** (-n / 2))
    J = int(np.floor((np.pi / 2 - theta) / (2 * theta)))
    ratio = np.sin(np.pi / (4 * J + 6)) / np.sin(theta)
    return J + 1, float(2 * np.arcsin(np.clip(ratio, -1.0, 1.0)))


def original_iterations(n: int) -> int:
    theta = np.arcsin(2 ** (-n / 2))
    return int(round(np.pi / (4 * theta) - 0.5))


def grover_iteration(width: int, tau: str, qubits: tuple[int, ...], phi: float = np.pi) -> list[GateOp]:
    """-H^w R_0 H^w R_tau on `qubits`, oracle first. phi = pi is the ordinary iteration."""
    return [phase_rotation_oracle(width, tau, phi, qubits),
            *hadamards(qubits),
            zero_reflection(width, phi, qubits),
            *hadamards(qubits)]


def dega_circuit(spec: TargetSpec) -> list[GateOp]:
    plan = partition(spec)
    gates = hadamards(tuple(range(spec.n)))
    for segment in plan.segments:
        if segment.width == 2:
            gates += grover_iteration(2, segment.tau, segment.qubits)
        else:
            phi = compute_phi()
            for _ in range(2):
                gates += grover_iteration(3, segment.tau, segment.qubits, phi)
    return gates


def grover_original_circuit(spec: TargetSpec, iterations: int | None = None) -> list[GateOp]:
    if iterations is None:
        iterations = original_iterations(spec.n)
    qubits = tuple(range(spec.n))
    gates = hadamards(qubits)
    for _ in range(iterations):
        gates += grover_iteration(spec.n, spec.tau, qubits)
    return gates


def grover_modified_circuit(spec: TargetSpec) -> list[GateOp]:
    iterations, phi = exact_phase(spec.n)
    qubits = tuple(range(spec.n))
    gates = hadamards(qubits)
    for _ in range(iterations):
        gates += grover_iteration(spec.n, spec.tau, qubits, phi)
    return gates


VARIANTS: dict[str, Callable[[TargetSpec], list[GateOp]]] = {
    "original": grover_original_circuit,
    "modified": grover_modified_circuit,
    "dega": dega_circuit,
}


def gate_count(circuit: list[GateOp]) -> int:
    return len(circuit)


def closed_form_success(n: int, iterations: int | None = None) -> float:
    """sin^2((2k + 1) theta) for k ordinary Grover iterations on n qubits."""
    if iterations is None:
        iterations = original_iterations(n)
    theta = np.arcsin(2 ** (-n / 2))
    return float(np.sin((2 * iterations + 1) * theta) ** 2)


def success_probability(circuit: list[GateOp], spec: TargetSpec, noise: NoiseModel | None = None,
                        shots: int | None = None, seed: int | None = None) -> float:
    """
    Probability of measuring `spec.tau` after `circuit`.

    Exact by default; with `shots` the frequency of tau in a multinomial sample.
    """
    probabilities = run_circuit(circuit, spec.n, noise)
    if shots is None:
        return float(probabilities[spec.index])
    return sample_counts(probabilities, shots, seed).get(spec.tau, 0) / shots


@lru_cache(maxsize=None)
def _dega_outcome(n: int, lookup: int) -> int:
    probabilities = run_circuit(dega_circuit(TargetSpec(n, bitstring(lookup, n))), n)
    return int(np.argmax(probabilities))


def search_bucket(membership: np.ndarray, lookup_offset: int) -> bool:
    """
    Decide whether slot `lookup_offset` of a bucket is occupied.

    The marked position is found by DEGA on log2(k) qubits and then checked
    classically against the membership vector.
    """
    k = membership.size
    n = k.bit_length() - 1
    if k < 4 or k != 2**n:
        raise ConfigurationError(f"bucket size k = {k} must be a power of two >= 4")
    if n > MAX_PURE_QUBITS:
        raise ConfigurationError(f"bucket size k = {k} exceeds the simulator's {MAX_PURE_QUBITS} qubits")
    if not 0 <= lookup_offset < k:
        raise IndexRangeError(f"lookup offset {lookup_offset} outside 0..{k - 1}")
    outcome = _dega_outcome(n, lookup_offset)
    logger.debug("DEGA on %d qubits measured %s", n, bitstring(outcome, n))
    return bool(membership[outcome])


def _variant_probability(variant: str, spec: TargetSpec, p: float | None,
                         shots: int | None, seed: int | None) -> float:
    # Checked before the circuit is built, whose unitaries grow as 4^n
    cap, kind = (MAX_PURE_QUBITS, "pure-state") if p is None else (MAX_DENSITY_QUBITS, "density-matrix")
    if spec.n > cap:
        raise SimulationError(f"{kind} simulation is capped at {cap} qubits, tau has {spec.n}")
    noise = None if p is None else NoiseModel(p)
    return success_probability(VARIANTS[variant](spec), spec, noise, shots, seed)


def noise_sweep(spec: TargetSpec, p_grid: list[float], variants: list[str] | None = None,
                shots: int | None = None, seed: int | None = None, n_jobs: int = 1) -> list[dict]:
    """Rows {p, variant, success_probability} for every p on the grid and every variant."""
    variants = variants or list(VARIANTS)
    jobs = [(p, v) for p in p_grid for v in variants]
    values = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_variant_probability)(v, spec, p, shots, seed) for p, v in jobs)
    logger.info("noise sweep over %d points for tau = %s", len(jobs), spec.tau)
    return [{"p": p, "variant": v, "success_probability": value} for (p, v), value in zip(jobs, values)]


def success_sweep(taus: list[str], variants: list[str] | None = None, exhaustive: bool = False,
                  shots: int | None = None, seed: int | None = None, n_jobs: int = 1) -> list[dict]:
    """
    Rows {n, tau, variant, success_probability} over noiseless runs.

    With `exhaustive`, every tau of every register size in `taus` is evaluated.
    """
    variants = variants or list(VARIANTS)
    if exhaustive:
        sizes = sorted({len(tau) for tau in taus})
        taus = [bitstring(x, n) for n in sizes for x in range(2**n)]
    jobs = [(tau, v) for tau in taus for v in variants]
    values = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_variant_probability)(v, TargetSpec(len(tau), tau), None, shots, seed) for tau, v in jobs)
    logger.info("success sweep over %d (tau, variant) pairs", len(jobs))
    return [{"n": len(tau), "tau": tau, "variant": v, "success_probability": value}
            for (tau, v), value in zip(jobs, values)]
