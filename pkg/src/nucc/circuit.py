"""Gate-level circuit representation with mid-circuit measurements.

A circuit is an ordered list of :class:`Gate`, :class:`MeasureOp` and
:class:`Reset` steps. A measured qubit must be reset before it is touched
again, which is how ancilla reuse is expressed.

Text format, one step per line::

    QUBITS 9
    ANCILLA amp 4
    RY 4 ; ; 0.6435011087932844
    CNOT 2 ; 4
    MEASURE 4 -0.6435011087932844 0 block0/amp
    RESET 4

Gate lines read ``KIND targets ; controls ; angle`` with comma-separated
index lists; angles are written with ``repr`` so a round trip is bit-exact.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Union

SINGLE_QUBIT = {"H", "X", "S", "Sdg", "T", "Tdg", "RY", "Phase"}
CONTROLLED = {"CNOT", "CZ", "CS", "CSdg", "CRY"}
ANGLED = {"RY", "Phase", "CRY"}
T_CLASS = {"T", "Tdg"}
ROTATIONS = {"RY", "Phase", "CRY"}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if self.kind in SINGLE_QUBIT:
            if len(self.targets) != 1 or self.controls:
                raise ValueError(f"{self.kind} takes one target and no controls")
        elif self.kind in CONTROLLED:
            if len(self.targets) != 1 or len(self.controls) != 1:
                raise ValueError(f"{self.kind} takes one control and one target")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if set(self.targets) & set(self.controls):
            raise ValueError("control and target qubits overlap")
        if (self.kind in ANGLED) != (self.angle is not None):
            raise ValueError(f"{self.kind} {'needs' if self.kind in ANGLED else 'takes no'} angle")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets


@dataclass(frozen=True)
class MeasureOp:
    """Computational-basis measurement after an optional ``RY(pre_rotation)``."""

    qubit: int
    pre_rotation: float | None = None
    desired_outcome: int = 0
    label: str = ""

    def __post_init__(self) -> None:
        if self.desired_outcome not in (0, 1):
            raise ValueError("desired_outcome must be 0 or 1")
        if self.label and any(ch.isspace() for ch in self.label):
            raise ValueError("measurement labels may not contain whitespace")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    @property
    def block(self) -> str:
        return self.label.split("/", 1)[0]


@dataclass(frozen=True)
class Reset:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


Step = Union[Gate, MeasureOp, Reset]


@dataclass(frozen=True)
class CircuitIR:
    n_qubits: int
    steps: tuple[Step, ...] = ()
    ancilla_map: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        measured: set[int] = set()
        for step in self.steps:
            for q in step.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"qubit {q} outside a {self.n_qubits}-qubit register")
            if isinstance(step, Reset):
                measured.discard(step.qubit)
                continue
            hit = measured.intersection(step.qubits)
            if hit:
                raise ValueError(f"qubit(s) {sorted(hit)} used after measurement without a reset")
            if isinstance(step, MeasureOp):
                measured.add(step.qubit)
        for label, q in self.ancilla_map.items():
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"ancilla {label} -> {q} outside the register")

    @property
    def system_qubits(self) -> tuple[int, ...]:
        anc = set(self.ancilla_map.values())
        return tuple(q for q in range(self.n_qubits) if q not in anc)

    @property
    def measurements(self) -> list[MeasureOp]:
        return [s for s in self.steps if isinstance(s, MeasureOp)]

    def __add__(self, other: CircuitIR) -> CircuitIR:
        return concat(self, other)

    # -- serialization --------------------------------------------------
    def to_text(self) -> str:
        lines = [f"QUBITS {self.n_qubits}"]
        lines += [f"ANCILLA {label} {q}" for label, q in self.ancilla_map.items()]
        for s in self.steps:
            if isinstance(s, Gate):
                angle = "" if s.angle is None else repr(s.angle)
                lines.append(f"{s.kind} {_ints(s.targets)} ; {_ints(s.controls)} ; {angle}".rstrip(" ;"))
            elif isinstance(s, MeasureOp):
                rot = "none" if s.pre_rotation is None else repr(s.pre_rotation)
                lines.append(f"MEASURE {s.qubit} {rot} {s.desired_outcome} {s.label or '-'}")
            else:
                lines.append(f"RESET {s.qubit}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> CircuitIR:
        n_qubits = None
        ancillas: dict[str, int] = {}
        steps: list[Step] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            try:
                if head == "QUBITS":
                    n_qubits = int(rest)
                elif head == "ANCILLA":
                    label, q = rest.split()
                    ancillas[label] = int(q)
                elif head == "MEASURE":
                    q, rot, desired, label = rest.split()
                    steps.append(
                        MeasureOp(int(q), None if rot == "none" else float(rot), int(desired), "" if label == "-" else label)
                    )
                elif head == "RESET":
                    steps.append(Reset(int(rest)))
                else:
                    parts = [p.strip() for p in rest.split(";")] + ["", ""]
                    steps.append(
                        Gate(head, _parse_ints(parts[0]), _parse_ints(parts[1]), float(parts[2]) if parts[2] else None)
                    )
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if n_qubits is None:
            raise ValueError("missing QUBITS line")
        return cls(n_qubits, tuple(steps), ancillas)

    def to_dict(self) -> dict:
        steps = []
        for s in self.steps:
            if isinstance(s, Gate):
                steps.append({"op": s.kind, "targets": list(s.targets), "controls": list(s.controls), "angle": s.angle})
            elif isinstance(s, MeasureOp):
                steps.append(
                    {"op": "MEASURE", "qubit": s.qubit, "pre_rotation": s.pre_rotation,
                     "desired": s.desired_outcome, "label": s.label}
                )
            else:
                steps.append({"op": "RESET", "qubit": s.qubit})
        return {"n_qubits": self.n_qubits, "ancilla_map": dict(self.ancilla_map), "steps": steps}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> CircuitIR:
        steps: list[Step] = []
        for s in doc["steps"]:
            if s["op"] == "MEASURE":
                steps.append(MeasureOp(s["qubit"], s["pre_rotation"], s["desired"], s["label"]))
            elif s["op"] == "RESET":
                steps.append(Reset(s["qubit"]))
            else:
                steps.append(Gate(s["op"], s["targets"], s["controls"], s["angle"]))
        return cls(doc["n_qubits"], tuple(steps), dict(doc.get("ancilla_map", {})))

    @classmethod
    def from_json(cls, text: str) -> CircuitIR:
        return cls.from_dict(json.loads(text))


def _ints(values: Iterable[int]) -> str:
    return ",".join(str(v) for v in values)


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",")) if text else ()


def concat(a: CircuitIR, b: CircuitIR) -> CircuitIR:
    n = max(a.n_qubits, b.n_qubits)
    return CircuitIR(n, a.steps + b.steps, {**a.ancilla_map, **b.ancilla_map})


def decompose_controlled_s(control: int, target: int, dagger: bool = False) -> list[Gate]:
    """Controlled-S (or S-dagger) as T/Tdg phases around two CNOTs."""
    if control == target:
        raise ValueError("control and target must differ")
    t, tdg = ("Tdg", "T") if dagger else ("T", "Tdg")
    return [
        Gate(t, (control,)),
        Gate("CNOT", (target,), (control,)),
        Gate(tdg, (target,)),
        Gate("CNOT", (target,), (control,)),
        Gate(t, (target,)),
    ]


def decompose(circ: CircuitIR) -> CircuitIR:
    steps: list[Step] = []
    for s in circ.steps:
        if isinstance(s, Gate) and s.kind in ("CS", "CSdg"):
            steps.extend(decompose_controlled_s(s.controls[0], s.targets[0], s.kind == "CSdg"))
        else:
            steps.append(s)
    return CircuitIR(circ.n_qubits, tuple(steps), dict(circ.ancilla_map))


def gate_census(circ: CircuitIR | Iterable[Step], decompose_cs: bool = False) -> Counter:
    """Tally gates by kind plus the aggregate keys ``two_qubit``, ``t_class``
    and ``rotations``.

    With ``decompose_cs`` controlled-S gates are expanded into two CNOTs and
    three T-class gates, and ``CZ`` is folded into the ``CNOT`` tally as one
    CNOT-equivalent two-qubit gate.
    """
    steps = circ.steps if isinstance(circ, CircuitIR) else tuple(circ)
    counts: Counter = Counter()
    for s in steps:
        if isinstance(s, MeasureOp):
            counts["measure"] += 1
        elif isinstance(s, Reset):
            counts["reset"] += 1
        elif decompose_cs and s.kind in ("CS", "CSdg"):
            counts["CNOT"] += 2
            counts["T" if s.kind == "CS" else "Tdg"] += 2
            counts["Tdg" if s.kind == "CS" else "T"] += 1
        elif decompose_cs and s.kind == "CZ":
            counts["CNOT"] += 1
        else:
            counts[s.kind] += 1
    counts["two_qubit"] = sum(counts[k] for k in CONTROLLED)
    counts["t_class"] = counts["T"] + counts["Tdg"]
    counts["rotations"] = sum(counts[k] for k in ROTATIONS)
    return +counts
