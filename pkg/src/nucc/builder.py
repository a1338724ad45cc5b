"""Non-unitary coupled-cluster state-preparation circuits.

Each excitation term ``T`` with amplitude ``alpha`` becomes a block that, when
every ancilla is measured as ``0``, maps the system state ``|psi>`` to
``(I + alpha T)|psi>`` up to normalization. Since ``T**2 = 0`` for a single
excitation, this is exactly ``exp(alpha T)|psi>``.

Block anatomy for an ``n``-body term (``2n + 1`` ancillas):

* amplitude ancilla ``A`` prepared as ``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``
  and finally measured in the basis whose first vector is
  ``cos(theta/2)|0> + sin(theta/2)|1>``;
* one ancilla ``f`` per ladder operator, prepared in ``|+>``, coupled to its
  orbital qubit by ``CSdg(f -> q)``, ``CNOT(A -> q)``, ``CS(f -> q)``, then a
  phase ``CSdg(A -> f)`` (creation) or ``CS(A -> f)`` (annihilation) and an
  ``H`` before measurement;
* ``CZ(A -> s)`` on every orbital ``s`` that carries an odd number of
  Jordan-Wigner ``Z`` factors of the term.

On the ``A = 0`` branch the two controlled-S gates on each orbital cancel and
each ``f`` returns to ``|0>`` with certainty; on the ``A = 1`` branch outcome
``0`` on ``f`` applies ``(X - iY)/2`` (creation) or ``(X + iY)/2``
(annihilation) to its orbital.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .chemio import CCAmplitudes
from .circuit import CircuitIR, Gate, MeasureOp, Reset
from .fermion import FermionProduct, apply_fermion_product

DEFAULT_DROP_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ExcitationTerm:
    """``amplitude * a^+_{c1} ... a^+_{cn} a_{in} ... a_{i1}``.

    ``creations`` and ``annihilations`` are strictly increasing; the
    annihilators act in ascending index order (``a_{i1}`` first).
    """

    creations: tuple[int, ...]
    annihilations: tuple[int, ...]
    amplitude: float = 0.0

    def __post_init__(self) -> None:
        cre = tuple(int(c) for c in self.creations)
        ann = tuple(int(a) for a in self.annihilations)
        object.__setattr__(self, "creations", cre)
        object.__setattr__(self, "annihilations", ann)
        if len(cre) != len(ann) or not cre:
            raise ValueError("need equal, non-zero numbers of creations and annihilations")
        for seq in (cre, ann):
            if any(b <= a for a, b in zip(seq, seq[1:])) or min(seq) < 0:
                raise ValueError("indices must be non-negative and strictly increasing")
        if set(cre) & set(ann):
            raise ValueError("creation and annihilation indices overlap")

    @property
    def n_body(self) -> int:
        return len(self.creations)

    @property
    def indices(self) -> tuple[int, ...]:
        return self.creations + self.annihilations

    def fermion_product(self, coefficient: complex = 1.0) -> FermionProduct:
        factors = [(c, True) for c in self.creations] + [(a, False) for a in reversed(self.annihilations)]
        return FermionProduct(tuple(factors), coefficient)

    def sort_key(self):
        return (self.n_body, self.annihilations, self.creations)

    def __str__(self) -> str:
        cre = " ".join(f"a+{c}" for c in self.creations)
        ann = " ".join(f"a{a}" for a in reversed(self.annihilations))
        return f"{cre} {ann}"


def jw_structure(term: ExcitationTerm) -> tuple[int, frozenset[int]]:
    """Return ``(sign, zset)`` with ``JW(T) = sign * Z_zset * prod sigma``.

    ``sigma`` is ``|1><0|`` on each creation qubit and ``|0><1|`` on each
    annihilation qubit; ``zset`` holds the spectator qubits that carry an odd
    number of string factors.
    """
    idx = set(term.indices)
    zset = frozenset(
        j for j in range(max(idx)) if j not in idx and sum(1 for p in term.indices if p > j) % 2
    )
    start = sum(1 << a for a in term.annihilations)
    amp, _ = apply_fermion_product(term.fermion_product(), start)
    return (1 if amp.real > 0 else -1), zset


@dataclass(frozen=True)
class AngleSpec:
    theta: float
    sign_phase: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.theta < math.pi:
            raise ValueError("theta must lie in [0, pi)")
        if self.sign_phase not in (0.0, math.pi):
            raise ValueError("sign_phase must be 0 or pi")


def amplitude_to_angle(alpha: float) -> AngleSpec:
    """Angle with ``tan(theta/2)**2 == |alpha|``; the sign rides on the phase."""
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError("amplitude must be finite")
    return AngleSpec(2.0 * math.atan(math.sqrt(abs(alpha))), 0.0 if alpha >= 0 else math.pi)


def build_fermionic_primitive(target: int, ancilla: int, select_creation: bool = True) -> CircuitIR:
    """Single ancilla-assisted ladder operator.

    Outcome 0 applies ``(X - iY)/2`` (creation) when ``select_creation``,
    otherwise ``(X + iY)/2``; outcome 1 applies the other one.
    """
    if target == ancilla:
        raise ValueError("target and ancilla must differ")
    steps = [
        Gate("H", (ancilla,)),
        Gate("CSdg", (target,), (ancilla,)),
        Gate("X", (target,)),
        Gate("CS", (target,), (ancilla,)),
        Gate("Sdg" if select_creation else "S", (ancilla,)),
        Gate("H", (ancilla,)),
        MeasureOp(ancilla, None, 0, "primitive/f"),
    ]
    return CircuitIR(max(target, ancilla) + 1, tuple(steps), {"f": ancilla})


@dataclass(frozen=True)
class BlockLayout:
    amplitude: int
    fermionic: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "fermionic", tuple(self.fermionic))
        qs = (self.amplitude,) + self.fermionic
        if len(set(qs)) != len(qs):
            raise ValueError("ancilla layout has a collision")


def build_excitation_block(
    term: ExcitationTerm,
    angle: AngleSpec,
    layout: BlockLayout,
    n_qubits: int | None = None,
    label: str = "block",
) -> list:
    """Steps of one excitation block (gates and measurements, no resets)."""
    if len(layout.fermionic) < 2 * term.n_body:
        raise ValueError(f"{term.n_body}-body term needs {2 * term.n_body} fermionic ancillas")
    anc = (layout.amplitude,) + layout.fermionic[: 2 * term.n_body]
    if set(anc) & set(term.indices):
        raise ValueError("ancilla layout collides with system qubits of the term")
    if n_qubits is not None and max(anc + term.indices) >= n_qubits:
        raise ValueError("layout exceeds the register")
    sign, zset = jw_structure(term)
    a = layout.amplitude
    phase = (angle.sign_phase + (math.pi if sign < 0 else 0.0)) % (2 * math.pi)
    pairs = list(zip(term.creations + term.annihilations, layout.fermionic))
    n_cre = term.n_body

    steps: list = [Gate("RY", (a,), angle=angle.theta)]
    if phase:
        steps.append(Gate("Phase", (a,), angle=phase))
    steps += [Gate("H", (f,)) for _, f in pairs]
    steps += [Gate("CSdg", (q,), (f,)) for q, f in pairs]
    steps += [Gate("CNOT", (q,), (a,)) for q, _ in pairs]
    steps += [Gate("CZ", (s,), (a,)) for s in sorted(zset)]
    steps += [Gate("CS", (q,), (f,)) for q, f in pairs]
    steps += [Gate("CSdg" if k < n_cre else "CS", (f,), (a,)) for k, (_, f) in enumerate(pairs)]
    steps += [Gate("H", (f,)) for _, f in pairs]
    steps.append(MeasureOp(a, -angle.theta, 0, f"{label}/amp"))
    steps += [MeasureOp(f, None, 0, f"{label}/f{k}") for k, (_, f) in enumerate(pairs)]
    return steps


def predicted_block_counts(term: ExcitationTerm) -> dict[str, int]:
    """Closed-form tally of one block with controlled-S gates decomposed.

    ``6n`` controlled-S gates give ``12n`` CNOTs and ``18n`` T-class gates;
    the ``2n`` amplitude CNOTs and one CZ per Z-string qubit come on top.
    """
    n = term.n_body
    _, zset = jw_structure(term)
    return {"CNOT": 14 * n + len(zset), "t_class": 18 * n, "H": 4 * n, "measure": 2 * n + 1}


def block_circuit(term: ExcitationTerm, n_system: int, angle: AngleSpec | None = None) -> CircuitIR:
    """Standalone block on ``n_system`` qubits with fresh ancillas above them."""
    angle = angle if angle is not None else amplitude_to_angle(term.amplitude)
    layout = BlockLayout(n_system, tuple(range(n_system + 1, n_system + 1 + 2 * term.n_body)))
    n = n_system + 1 + 2 * term.n_body
    steps = build_excitation_block(term, angle, layout, n)
    amap = {"amp": layout.amplitude, **{f"f{k}": q for k, q in enumerate(layout.fermionic)}}
    return CircuitIR(n, tuple(steps), amap)


@dataclass(frozen=True)
class StatePrepPlan:
    n_system_qubits: int
    reference_occupation: int
    blocks: tuple[tuple[ExcitationTerm, AngleSpec], ...] = ()
    drop_threshold: float = DEFAULT_DROP_THRESHOLD

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for term, _ in self.blocks:
            if abs(term.amplitude) < self.drop_threshold:
                raise ValueError(f"block {term} is below the drop threshold")
            if max(term.indices) >= self.n_system_qubits:
                raise ValueError(f"block {term} exceeds the system register")
        keys = [t.sort_key() for t, _ in self.blocks]
        if keys != sorted(keys):
            raise ValueError("blocks must be ordered singles first, then by (annihilations, creations)")

    @property
    def terms(self) -> list[ExcitationTerm]:
        return [t for t, _ in self.blocks]

    @property
    def max_body(self) -> int:
        return max((t.n_body for t, _ in self.blocks), default=0)

    def oracle_blocks(self) -> list[tuple[ExcitationTerm, float]]:
        return [(t, t.amplitude) for t, _ in self.blocks]


def amplitudes_to_terms(amps: CCAmplitudes) -> list[ExcitationTerm]:
    terms = [ExcitationTerm((a,), (i,), t) for i, a, t in amps.singles]
    terms += [ExcitationTerm((a, b), (i, j), t) for i, j, a, b, t in amps.doubles]
    return sorted(terms, key=ExcitationTerm.sort_key)


def plan_state_prep(amps: CCAmplitudes, drop_threshold: float = DEFAULT_DROP_THRESHOLD) -> StatePrepPlan:
    kept = [t for t in amplitudes_to_terms(amps) if abs(t.amplitude) >= drop_threshold]
    return StatePrepPlan(
        amps.n_spin_orbitals,
        (1 << amps.n_electrons) - 1,
        tuple((t, amplitude_to_angle(t.amplitude)) for t in kept),
        drop_threshold,
    )


def plan_from_terms(
    terms: Sequence[ExcitationTerm], n_system: int, reference: int, drop_threshold: float = 0.0
) -> StatePrepPlan:
    kept = sorted((t for t in terms if abs(t.amplitude) >= drop_threshold), key=ExcitationTerm.sort_key)
    return StatePrepPlan(n_system, reference, tuple((t, amplitude_to_angle(t.amplitude)) for t in kept), drop_threshold)


def ancilla_count(plan: StatePrepPlan, reuse_ancillas: bool = True) -> int:
    if not plan.blocks:
        return 0
    if reuse_ancillas:
        return 2 * plan.max_body + 1
    return sum(2 * t.n_body + 1 for t in plan.terms)


def assemble_circuit(plan: StatePrepPlan, reuse_ancillas: bool = True, n_system: int | None = None) -> CircuitIR:
    """Reference-state X gates followed by every block in plan order.

    Ancillas sit above the system register. With ``reuse_ancillas`` the same
    ``2 n_max + 1`` ancillas are reset between blocks.
    """
    n_sys = plan.n_system_qubits
    if n_system is not None and n_system != n_sys:
        raise ValueError(f"plan has {n_sys} system qubits, expected {n_system}")
    if plan.reference_occupation >> n_sys:
        raise ValueError("reference occupation exceeds the system register")
    n_anc = ancilla_count(plan, reuse_ancillas)
    steps: list = [Gate("X", (q,)) for q in range(n_sys) if plan.reference_occupation >> q & 1]
    amap: dict[str, int] = {}
    nxt = n_sys
    for k, (term, angle) in enumerate(plan.blocks):
        width = 2 * term.n_body
        if reuse_ancillas:
            layout = BlockLayout(n_sys, tuple(range(n_sys + 1, n_sys + 1 + width)))
            if k:
                used = 2 * plan.blocks[k - 1][0].n_body + 1
                steps += [Reset(q) for q in range(n_sys, n_sys + used)]
        else:
            layout = BlockLayout(nxt, tuple(range(nxt + 1, nxt + 1 + width)))
            nxt += width + 1
        steps += build_excitation_block(term, angle, layout, n_sys + n_anc, label=f"block{k}")
        tag = "" if reuse_ancillas else f"{k}_"
        amap[f"{tag}amp"] = layout.amplitude
        amap.update({f"{tag}f{j}": q for j, q in enumerate(layout.fermionic)})
    return CircuitIR(n_sys + n_anc, tuple(steps), amap)
