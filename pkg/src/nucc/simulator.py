"""Statevector simulation with post-selected and sampled mid-circuit measurement."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .circuit import CircuitIR, Gate, MeasureOp, Reset
from .fermion import jw_transform
from .pauli import PauliTermSum, apply_pauli_sum, to_sparse_matrix

ORACLE_LIMIT = 16
ZERO_BRANCH = 1e-14
NORM_TOL = 1e-10


class ZeroProbabilityError(RuntimeError):
    """A desired measurement outcome (or an oracle product) has zero weight."""

    def __init__(self, message: str, block: str | None = None) -> None:
        self.block = block
        super().__init__(message)


class ConvergenceError(RuntimeError):
    pass


_SQ2 = 1 / np.sqrt(2)
_FIXED = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
}
_DIAG_PHASE = {
    "S": 1j,
    "Sdg": -1j,
    "T": np.exp(1j * np.pi / 4),
    "Tdg": np.exp(-1j * np.pi / 4),
    "CZ": -1.0,
    "CS": 1j,
    "CSdg": -1j,
}


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 matrix applied to the target when all controls are set."""
    kind = gate.kind
    if kind in ("X", "CNOT"):
        return _FIXED["X"]
    if kind == "H":
        return _FIXED["H"]
    if kind in ("RY", "CRY"):
        return ry_matrix(gate.angle)
    if kind == "Phase":
        return np.diag([1, np.exp(1j * gate.angle)])
    return np.diag([1, _DIAG_PHASE[kind]])


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude count does not match 2**n_qubits")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> StateVector:
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1
        return cls(n_qubits, amps)

    def overlap(self, other: StateVector) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: StateVector) -> float:
        return abs(self.overlap(other)) ** 2


# ---------------------------------------------------------------------------
# in-place kernels on raw arrays


def _view(psi: np.ndarray, n: int, qubit: int, controls: Sequence[int] = ()):
    """Return (sub-array with controls fixed to 1, axis of ``qubit`` in it)."""
    t = psi.reshape((2,) * n)
    idx: list = [slice(None)] * n
    for c in controls:
        idx[n - 1 - c] = 1
    sub = t[tuple(idx)]
    axis = (n - 1 - qubit) - sum(1 for c in controls if n - 1 - c < n - 1 - qubit)
    return sub, axis


def _apply_inplace(psi: np.ndarray, n: int, gate: Gate) -> None:
    target = gate.targets[0]
    sub, axis = _view(psi, n, target, gate.controls)
    m = gate_matrix(gate)
    sel0 = [slice(None)] * sub.ndim
    sel1 = list(sel0)
    sel0[axis], sel1[axis] = 0, 1
    sel0, sel1 = tuple(sel0), tuple(sel1)
    if m[0, 1] == 0 and m[1, 0] == 0:
        if m[0, 0] != 1:
            sub[sel0] *= m[0, 0]
        sub[sel1] *= m[1, 1]
        return
    a0 = sub[sel0].copy()
    a1 = sub[sel1]
    sub[sel0] = m[0, 0] * a0 + m[0, 1] * a1
    sub[sel1] = m[1, 0] * a0 + m[1, 1] * a1


def _prob_one(psi: np.ndarray, n: int, qubit: int) -> float:
    sub, axis = _view(psi, n, qubit)
    return float(np.sum(np.abs(np.take(sub, 1, axis=axis)) ** 2))


def _project(psi: np.ndarray, n: int, qubit: int, outcome: int) -> None:
    sub, axis = _view(psi, n, qubit)
    sel = [slice(None)] * sub.ndim
    sel[axis] = 1 - outcome
    sub[tuple(sel)] = 0


def _check_qubits(n: int, qubits: Iterable[int]) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")


# ---------------------------------------------------------------------------
# public single-step operations


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    _check_qubits(state.n_qubits, gate.qubits)
    psi = state.amplitudes.copy()
    _apply_inplace(psi, state.n_qubits, gate)
    return StateVector(state.n_qubits, psi)


def measure_project(
    state: StateVector, qubit: int, outcome: int, pre_rotation: float | None = None
) -> tuple[StateVector | None, float]:
    """Project ``qubit`` onto ``outcome`` after an optional ``RY(pre_rotation)``.

    Returns ``(post_state, probability)``. A zero-probability branch returns
    ``(None, 0.0)`` instead of a renormalized state.
    """
    n = state.n_qubits
    _check_qubits(n, (qubit,))
    psi = state.amplitudes.copy()
    if pre_rotation is not None:
        _apply_inplace(psi, n, Gate("RY", (qubit,), angle=pre_rotation))
    p1 = _prob_one(psi, n, qubit)
    p = p1 if outcome else 1.0 - p1
    if p <= ZERO_BRANCH:
        return None, 0.0
    _project(psi, n, qubit, outcome)
    psi /= np.sqrt(p)
    return StateVector(n, psi), p


# ---------------------------------------------------------------------------
# whole-circuit execution


@dataclass(frozen=True)
class RunResult:
    final_state: StateVector
    success_probability: float
    per_block_probabilities: tuple[float, ...]
    block_labels: tuple[str, ...] = ()


def _embed(circ: CircuitIR, init: StateVector | None) -> np.ndarray:
    system = circ.system_qubits
    if init is None:
        psi = np.zeros(1 << circ.n_qubits, dtype=np.complex128)
        psi[0] = 1
        return psi
    if init.n_qubits == circ.n_qubits:
        return init.amplitudes.copy()
    if init.n_qubits != len(system):
        raise ValueError(
            f"initial state has {init.n_qubits} qubits; circuit has {len(system)} system qubits"
        )
    idx = np.zeros(1 << len(system), dtype=np.int64)
    k = np.arange(1 << len(system))
    for pos, q in enumerate(system):
        idx |= ((k >> pos) & 1) << q
    psi = np.zeros(1 << circ.n_qubits, dtype=np.complex128)
    psi[idx] = init.amplitudes
    return psi


def _extract_system(psi: np.ndarray, circ: CircuitIR, ancilla_bits: dict[int, int]) -> np.ndarray:
    system = circ.system_qubits
    k = np.arange(1 << len(system))
    idx = np.zeros_like(k)
    for pos, q in enumerate(system):
        idx |= ((k >> pos) & 1) << q
    for q, bit in ancilla_bits.items():
        if bit and q not in system:
            idx |= 1 << q
    return psi[idx]


def _execute(circ: CircuitIR, psi: np.ndarray, normalize: bool):
    """Post-select every measurement on its desired outcome.

    Returns (psi, per-block probabilities, block labels, final ancilla bits).
    With ``normalize`` false the branch operator is applied without
    renormalization, so the returned vector carries the success amplitude.
    """
    n = circ.n_qubits
    blocks: dict[str, float] = {}
    bits: dict[int, int] = {}
    for step in circ.steps:
        if isinstance(step, Gate):
            _apply_inplace(psi, n, step)
        elif isinstance(step, MeasureOp):
            if step.pre_rotation is not None:
                _apply_inplace(psi, n, Gate("RY", (step.qubit,), angle=step.pre_rotation))
            norm2 = float(np.vdot(psi, psi).real)
            p1 = _prob_one(psi, n, step.qubit) / norm2 if norm2 > 0 else 0.0
            p = p1 if step.desired_outcome else 1.0 - p1
            if p <= ZERO_BRANCH:
                raise ZeroProbabilityError(
                    f"measurement {step.label or step.qubit} cannot yield {step.desired_outcome}",
                    step.block or None,
                )
            _project(psi, n, step.qubit, step.desired_outcome)
            if normalize:
                psi /= np.sqrt(p * norm2)
            blocks[step.block] = blocks.get(step.block, 1.0) * p
            bits[step.qubit] = step.desired_outcome
        elif isinstance(step, Reset):
            q = step.qubit
            if q in bits:
                if bits[q]:
                    _apply_inplace(psi, n, Gate("X", (q,)))
            else:
                p1 = _prob_one(psi, n, q)
                if min(p1, float(np.vdot(psi, psi).real) - p1) > ZERO_BRANCH:
                    raise ValueError(f"reset of qubit {q} in superposition is not post-selectable")
                if p1 > ZERO_BRANCH:
                    _apply_inplace(psi, n, Gate("X", (q,)))
            bits[q] = 0
    return psi, blocks, bits


def run_postselected(circ: CircuitIR, init: StateVector | None = None) -> RunResult:
    psi = _embed(circ, init)
    psi, blocks, bits = _execute(circ, psi, normalize=True)
    system = _extract_system(psi, circ, bits)
    norm = np.linalg.norm(system)
    if abs(norm - 1) > 1e-8:
        raise RuntimeError("ancillas are entangled with the system after the run")
    probs = tuple(blocks.values())
    return RunResult(
        StateVector(len(circ.system_qubits), system / norm),
        float(np.prod(probs)) if probs else 1.0,
        probs,
        tuple(blocks),
    )


def branch_operator(circ: CircuitIR) -> np.ndarray:
    """Matrix of the all-desired-outcomes branch on the system qubits.

    Column ``k`` is the unnormalized output for system basis input ``k``;
    ancillas start in ``|0>``.
    """
    n_sys = len(circ.system_qubits)
    cols = []
    for k in range(1 << n_sys):
        psi = _embed(circ, StateVector.basis(n_sys, k))
        try:
            psi, _, bits = _execute(circ, psi, normalize=False)
        except ZeroProbabilityError:
            cols.append(np.zeros(1 << n_sys, dtype=np.complex128))
            continue
        cols.append(_extract_system(psi, circ, bits))
    return np.array(cols).T


@dataclass(frozen=True)
class ShotRecord:
    shots: int
    successes: int
    outcome_histogram: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.successes > self.shots or sum(self.outcome_histogram.values()) != self.shots:
            raise ValueError("inconsistent shot record")

    @property
    def success_rate(self) -> float:
        return self.successes / self.shots

    def merge(self, other: ShotRecord) -> ShotRecord:
        hist = Counter(self.outcome_histogram)
        hist.update(other.outcome_histogram)
        return ShotRecord(self.shots + other.shots, self.successes + other.successes, dict(hist))


def run_sampled(
    circ: CircuitIR, init: StateVector | None = None, seed: int | None = 0, shots: int = 1000
) -> ShotRecord:
    """Sample every mid-circuit measurement from its Born probability.

    Shots sharing an outcome history share a statevector: at each
    measurement the branch's shot count is split binomially, which draws
    from the same joint distribution as running the shots one by one.
    Deterministic for a fixed seed (numpy PCG64).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    n = circ.n_qubits
    desired = "".join(str(m.desired_outcome) for m in circ.measurements)
    branches: list[tuple[str, int, np.ndarray]] = [("", shots, _embed(circ, init))]
    for step in circ.steps:
        if isinstance(step, Gate):
            for _, _, psi in branches:
                _apply_inplace(psi, n, step)
            continue
        record = isinstance(step, MeasureOp)
        if record and step.pre_rotation is not None:
            for _, _, psi in branches:
                _apply_inplace(psi, n, Gate("RY", (step.qubit,), angle=step.pre_rotation))
        q = step.qubit
        new: list[tuple[str, int, np.ndarray]] = []
        for hist, count, psi in branches:
            p1 = min(max(_prob_one(psi, n, q), 0.0), 1.0)
            k1 = int(rng.binomial(count, p1))
            for outcome, m in ((0, count - k1), (1, k1)):
                if m == 0:
                    continue
                child = psi.copy() if (k1 and count - k1) else psi
                _project(child, n, q, outcome)
                child /= np.sqrt(p1 if outcome else 1 - p1)
                if not record and outcome:
                    _apply_inplace(child, n, Gate("X", (q,)))
                new.append((hist + str(outcome) if record else hist, m, child))
        branches = new
    hist = Counter()
    for h, count, _ in branches:
        hist[h] += count
    return ShotRecord(shots, hist.get(desired, 0), dict(hist))


# ---------------------------------------------------------------------------
# observables and oracles


def expectation(state: StateVector | np.ndarray, op: PauliTermSum) -> float:
    if not op.is_hermitian():
        raise ValueError("expectation requires a Hermitian operator")
    amps = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    value = np.vdot(amps, apply_pauli_sum(op, amps))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residual {value.imag}")
    return float(value.real)


def oracle_product_state(reference: int, blocks, n: int) -> StateVector:
    """Normalized ``prod_k (I + alpha_k T_k) |reference>`` from sparse JW matrices.

    ``blocks`` is a sequence of ``(term, alpha)`` with ``term`` anything having
    a ``fermion_product()`` method; the first block acts first.
    """
    if n > ORACLE_LIMIT:
        raise ValueError(f"{n} qubits exceeds the oracle limit {ORACLE_LIMIT}")
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[reference] = 1
    for term, alpha in blocks:
        t = to_sparse_matrix(jw_transform(term.fermion_product(), n))
        psi = psi + alpha * (t @ psi)
    norm = np.linalg.norm(psi)
    if norm <= 1e-12:
        raise ZeroProbabilityError("oracle product annihilated the reference state")
    return StateVector(n, psi / norm)


def sector_indices(n: int, n_electrons: int | None = None, n_alpha: int | None = None) -> np.ndarray:
    k = np.arange(1 << n, dtype=np.int64)
    keep = np.ones(k.shape, dtype=bool)
    if n_electrons is not None:
        keep &= np.bitwise_count(k) == n_electrons
    if n_alpha is not None:
        even = sum(1 << q for q in range(0, n, 2))
        keep &= np.bitwise_count(k & even) == n_alpha
    return k[keep]


def lowest_eigenpairs(
    op: PauliTermSum, k: int = 1, n_electrons: int | None = None, n_alpha: int | None = None,
    tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenpairs, optionally inside a particle-number sector.

    Returns (energies, vectors embedded in the full space as columns, residuals).
    """
    n = op.n_qubits
    if n > ORACLE_LIMIT:
        raise ValueError(f"{n} qubits exceeds the oracle limit {ORACLE_LIMIT}")
    if not op.is_hermitian():
        raise ValueError("eigensolver requires a Hermitian operator")
    h = to_sparse_matrix(op)
    idx = sector_indices(n, n_electrons, n_alpha)
    hs = h[idx][:, idx]
    dim = hs.shape[0]
    if dim <= 512:
        w, v = np.linalg.eigh(hs.toarray())
        w, v = w[:k], v[:, :k]
    else:
        try:
            w, v = spla.eigsh(hs, k=k, which="SA", tol=tol * 1e-3, maxiter=10 * dim)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"eigensolver did not converge: {exc}") from None
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    resid = np.linalg.norm(hs @ v - v * w, axis=0)
    if np.any(resid > tol):
        raise ConvergenceError(f"eigen-residual {resid.max():.3e} exceeds {tol}")
    full = np.zeros((1 << n, v.shape[1]), dtype=np.complex128)
    full[idx] = v
    return w, full, resid


def ground_state(
    op: PauliTermSum, n_electrons: int | None = None, n_alpha: int | None = None
) -> tuple[float, StateVector]:
    w, v, _ = lowest_eigenpairs(op, 1, n_electrons, n_alpha)
    vec = v[:, 0]
    # fix the arbitrary global phase so the largest amplitude is real positive
    j = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[j]) / vec[j])
    return float(w[0]), StateVector(op.n_qubits, vec / np.linalg.norm(vec))


def ground_overlap(
    state: StateVector, op: PauliTermSum, n_electrons: int | None = None, n_alpha: int | None = None,
    degeneracy_tol: float = 1e-6, max_states: int = 4,
) -> float:
    """``|<ground|state>|``, projecting onto the whole ground space when degenerate."""
    k = min(max_states, len(sector_indices(op.n_qubits, n_electrons, n_alpha)))
    w, v, _ = lowest_eigenpairs(op, k, n_electrons, n_alpha)
    ground = v[:, np.abs(w - w[0]) <= degeneracy_tol]
    return float(np.linalg.norm(ground.conj().T @ state.amplitudes))
