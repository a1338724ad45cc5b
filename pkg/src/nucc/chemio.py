"""Reading molecular inputs: FCIDUMP integrals, CC amplitudes, Pauli Hamiltonians.

Spin-orbitals are interleaved: spatial orbital ``p`` with spin up is ``2p``
and with spin down is ``2p + 1``. The reference determinant occupies the
lowest ``n_electrons`` spin-orbitals.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .fermion import FermionProduct, jw_transform
from .pauli import PauliTermSum, word_to_xz

SYMMETRY_TOL = 1e-10


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ---------------------------------------------------------------------------
# FCIDUMP


@dataclass(frozen=True, eq=False)
class MolecularIntegrals:
    n_spatial_orbitals: int
    n_electrons: int
    core_energy: float
    one_body: np.ndarray
    two_body: np.ndarray
    ms2: int = 0

    def __post_init__(self) -> None:
        n = self.n_spatial_orbitals
        h = np.asarray(self.one_body, dtype=float)
        g = np.asarray(self.two_body, dtype=float)
        if h.shape != (n, n) or g.shape != (n,) * 4:
            raise ValueError("integral arrays do not match n_spatial_orbitals")
        if not np.allclose(h, h.T, atol=SYMMETRY_TOL, rtol=0):
            raise ValueError("one-body integrals are not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(g, g.transpose(perm), atol=SYMMETRY_TOL, rtol=0):
                raise ValueError("two-body integrals break 8-fold symmetry")
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "one_body", h)
        object.__setattr__(self, "two_body", g)

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial_orbitals


_HEADER_END = re.compile(r"(&END|/)\s*$", re.IGNORECASE)


def _parse_header(header: str) -> dict[str, list[str]]:
    body = re.sub(r"^\s*&FCI", "", header.strip(), flags=re.IGNORECASE)
    body = _HEADER_END.sub("", body.strip())
    fields: dict[str, list[str]] = {}
    key = None
    for token in re.split(r"[,\s]+", body):
        if not token:
            continue
        if "=" in token:
            key, _, value = token.partition("=")
            key = key.strip().upper()
            fields[key] = [value] if value else []
        elif key is not None:
            fields[key].append(token)
    return fields


def _symmetry_images(i: int, j: int, k: int, l: int):
    for a, b in ((i, j), (j, i)):
        for c, d in ((k, l), (l, k)):
            yield a, b, c, d
            yield c, d, a, b


def parse_fcidump(text: str) -> MolecularIntegrals:
    lines = text.splitlines()
    header_lines: list[str] = []
    body_start = None
    for idx, line in enumerate(lines):
        header_lines.append(line)
        if _HEADER_END.search(line.strip()):
            body_start = idx + 1
            break
    if body_start is None or not header_lines[0].strip().upper().startswith("&FCI"):
        raise ParseError("missing '&FCI ... &END' header", 1)
    fields = _parse_header(" ".join(header_lines))
    try:
        norb = int(fields["NORB"][0])
        nelec = int(fields["NELEC"][0])
        ms2 = int(fields["MS2"][0]) if fields.get("MS2") else 0
    except (KeyError, IndexError, ValueError) as exc:
        raise ParseError(f"header lacks a valid NORB/NELEC: {exc}", 1) from None
    if norb <= 0 or nelec < 0:
        raise ParseError("NORB must be positive and NELEC non-negative", 1)

    h = np.zeros((norb, norb))
    g = np.zeros((norb,) * 4)
    h_set = np.zeros((norb, norb), dtype=bool)
    g_set = np.zeros((norb,) * 4, dtype=bool)
    core = 0.0
    core_set = False

    def put(arr, seen, idx, value, lineno):
        if seen[idx] and abs(arr[idx] - value) > SYMMETRY_TOL:
            raise ParseError(f"conflicting duplicate record for {idx}", lineno)
        arr[idx] = value
        seen[idx] = True

    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise ParseError(f"expected 'value i j k l', got {line.strip()!r}", lineno)
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(t) for t in parts[1:])
        except ValueError:
            raise ParseError(f"non-numeric record {line.strip()!r}", lineno) from None
        if not all(0 <= t <= norb for t in (i, j, k, l)):
            raise ParseError(f"index out of NORB={norb} range in {line.strip()!r}", lineno)
        if i and j and k and l:
            for img in _symmetry_images(i - 1, j - 1, k - 1, l - 1):
                put(g, g_set, img, value, lineno)
        elif i and j and not (k or l):
            put(h, h_set, (i - 1, j - 1), value, lineno)
            put(h, h_set, (j - 1, i - 1), value, lineno)
        elif not (i or j or k or l):
            if core_set and abs(core - value) > SYMMETRY_TOL:
                raise ParseError("conflicting core-energy records", lineno)
            core, core_set = value, True
        elif i and not (j or k or l):
            continue  # orbital energy, not needed
        else:
            raise ParseError(f"unrecognized index pattern in {line.strip()!r}", lineno)
    return MolecularIntegrals(norb, nelec, core, h, g, ms2)


def emit_fcidump(ints: MolecularIntegrals, tol: float = 0.0) -> str:
    n = ints.n_spatial_orbitals
    out = [f"&FCI NORB={n},NELEC={ints.n_electrons},MS2={ints.ms2},", "&END"]
    g, h = ints.two_body, ints.one_body
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    if abs(g[i, j, k, l]) > tol:
                        out.append(f"{float(g[i, j, k, l])!r} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            if abs(h[i, j]) > tol:
                out.append(f"{float(h[i, j])!r} {i + 1} {j + 1} 0 0")
    out.append(f"{float(ints.core_energy)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Hamiltonians


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    qubit_hamiltonian: PauliTermSum
    n_qubits: int
    n_electrons: int
    reference_occupation: int
    reference_energy: float | None = None
    cc_reference_energy: float | None = None

    def __post_init__(self) -> None:
        if not self.qubit_hamiltonian.is_hermitian():
            raise ValueError("qubit Hamiltonian is not Hermitian")
        if bin(self.reference_occupation).count("1") != self.n_electrons:
            raise ValueError("reference occupation does not hold n_electrons")
        if self.n_electrons > self.n_qubits:
            raise ValueError("more electrons than spin-orbitals")

    def with_electrons(self, n_electrons: int) -> HamiltonianSpec:
        ref = (1 << n_electrons) - 1
        return HamiltonianSpec(
            self.qubit_hamiltonian,
            self.n_qubits,
            n_electrons,
            ref,
            diagonal_energy(self.qubit_hamiltonian, ref),
            self.cc_reference_energy,
        )


def build_qubit_hamiltonian(ints: MolecularIntegrals, cutoff: float = 1e-14) -> HamiltonianSpec:
    n_so = ints.n_spin_orbitals
    if ints.n_electrons > n_so:
        raise ValueError("more electrons than spin-orbitals")
    norb = ints.n_spatial_orbitals
    total = PauliTermSum.identity(n_so, ints.core_energy)
    acc: dict = dict(total.xz_items())

    def add(prod: FermionProduct) -> None:
        for key, c in jw_transform(prod, n_so).xz_items():
            acc[key] = acc.get(key, 0) + c

    h, g = ints.one_body, ints.two_body
    for p, q in product(range(norb), repeat=2):
        if abs(h[p, q]) > cutoff:
            for s in (0, 1):
                add(FermionProduct(((2 * p + s, True), (2 * q + s, False)), h[p, q]))
    for p, q, r, s in product(range(norb), repeat=4):
        v = g[p, q, r, s]
        if abs(v) <= cutoff:
            continue
        for sig, tau in product((0, 1), repeat=2):
            P, Q, R, S = 2 * p + sig, 2 * q + sig, 2 * r + tau, 2 * s + tau
            if P == R or Q == S:
                continue
            add(FermionProduct(((P, True), (R, True), (S, False), (Q, False)), 0.5 * v))
    # Pauli strings are Hermitian, so a Hermitian sum has real coefficients.
    op = PauliTermSum(n_so, acc)
    if not op.is_hermitian():
        raise ValueError("assembled Hamiltonian is not Hermitian")
    op = PauliTermSum(n_so, {k: v.real for k, v in op.xz_items()})
    ref = (1 << ints.n_electrons) - 1
    return HamiltonianSpec(op, n_so, ints.n_electrons, ref, reference_energy=diagonal_energy(op, ref))


def diagonal_energy(op: PauliTermSum, occupation: int) -> float:
    """``<occ|op|occ>`` for a computational basis state."""
    e = 0.0
    for (x, z), c in op.xz_items():
        if x == 0:
            e += c.real * (-1) ** bin(occupation & z).count("1")
    return e


def parse_pauli_hamiltonian(text: str, n_electrons: int = 0) -> HamiltonianSpec:
    terms: dict[tuple[int, int], complex] = {}
    n_qubits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'coeff WORD', got {raw.strip()!r}", lineno)
        coeff_txt, word = parts
        coeff_txt = coeff_txt.replace("−", "-").replace("i", "j")
        try:
            coeff = complex(coeff_txt)
        except ValueError:
            raise ParseError(f"bad coefficient {parts[0]!r}", lineno) from None
        try:
            key = word_to_xz(word.upper())
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if n_qubits is None:
            n_qubits = len(word)
        elif len(word) != n_qubits:
            raise ParseError(f"word {word!r} has {len(word)} qubits, expected {n_qubits}", lineno)
        terms[key] = terms.get(key, 0) + coeff
    if n_qubits is None:
        raise ParseError("no Pauli terms found")
    op = PauliTermSum(n_qubits, terms)
    if not op.is_hermitian():
        raise ParseError("Hamiltonian is not Hermitian (complex coefficient on a Pauli word)")
    op = PauliTermSum(n_qubits, {k: v.real for k, v in op.xz_items()})
    ref = (1 << n_electrons) - 1
    return HamiltonianSpec(op, n_qubits, n_electrons, ref, reference_energy=diagonal_energy(op, ref))


# ---------------------------------------------------------------------------
# Cluster amplitudes


@dataclass(frozen=True)
class CCAmplitudes:
    """Unique CC amplitudes on interleaved spin-orbitals.

    A single ``(i, a, t)`` stands for ``t a^dagger_a a_i``; a double
    ``(i, j, a, b, t)`` with ``i < j`` and ``a < b`` stands for
    ``t a^dagger_a a^dagger_b a_j a_i`` (the antisymmetrized quarter factor
    already absorbed).
    """

    n_spin_orbitals: int
    n_electrons: int
    singles: tuple[tuple[int, int, float], ...] = ()
    doubles: tuple[tuple[int, int, int, int, float], ...] = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.n_electrons <= self.n_spin_orbitals:
            raise ValueError("need 0 <= n_electrons <= n_spin_orbitals")
        for i, a, _ in self.singles:
            self._check_occ(i)
            self._check_vir(a)
        for i, j, a, b, _ in self.doubles:
            if not (i < j and a < b):
                raise ValueError("doubles must be stored with i < j and a < b")
            self._check_occ(i)
            self._check_occ(j)
            self._check_vir(a)
            self._check_vir(b)

    def _check_occ(self, i: int) -> None:
        if not 0 <= i < self.n_electrons:
            raise ValueError(f"occupied index {i} outside [0, {self.n_electrons})")

    def _check_vir(self, a: int) -> None:
        if not self.n_electrons <= a < self.n_spin_orbitals:
            raise ValueError(f"virtual index {a} outside [{self.n_electrons}, {self.n_spin_orbitals})")

    @property
    def cc_energy(self) -> float | None:
        return self.metadata.get("cc_energy")

    def to_json(self) -> str:
        doc = {
            "n_spin_orbitals": self.n_spin_orbitals,
            "n_electrons": self.n_electrons,
            "singles": [[i, a, t] for i, a, t in self.singles],
            "doubles": [[i, j, a, b, t] for i, j, a, b, t in self.doubles],
        }
        doc.update(self.metadata)
        return json.dumps(doc, indent=1)


def canonical_double(i: int, j: int, a: int, b: int, t: float) -> tuple[int, int, int, int, float]:
    if i == j or a == b:
        raise ValueError(f"repeated index in double ({i},{j})->({a},{b})")
    if i > j:
        i, j, t = j, i, -t
    if a > b:
        a, b, t = b, a, -t
    return i, j, a, b, t


def parse_amplitudes(text: str) -> CCAmplitudes:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    try:
        nso = int(doc["n_spin_orbitals"])
        nel = int(doc["n_electrons"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("amplitude file needs integer n_spin_orbitals and n_electrons") from None
    meta = {k: v for k, v in doc.items() if k not in ("n_spin_orbitals", "n_electrons", "singles", "doubles")}

    def occ(i, where):
        if not 0 <= i < nel:
            raise ParseError(f"{where}: occupied index {i} outside [0, {nel})")

    def vir(a, where):
        if not nel <= a < nso:
            raise ParseError(f"{where}: virtual index {a} outside [{nel}, {nso})")

    singles: dict[tuple[int, int], float] = {}
    for n, rec in enumerate(doc.get("singles", [])):
        where = f"singles[{n}] {rec}"
        try:
            i, a, t = int(rec[0]), int(rec[1]), float(rec[2])
            if len(rec) != 3:
                raise ValueError
        except (TypeError, ValueError, IndexError):
            raise ParseError(f"{where}: expected [i, a, t]") from None
        occ(i, where)
        vir(a, where)
        if (i, a) in singles:
            raise ParseError(f"{where}: duplicate single")
        singles[(i, a)] = t

    doubles: dict[tuple[int, int, int, int], float] = {}
    for n, rec in enumerate(doc.get("doubles", [])):
        where = f"doubles[{n}] {rec}"
        try:
            i, j, a, b = (int(v) for v in rec[:4])
            t = float(rec[4])
            if len(rec) != 5:
                raise ValueError
        except (TypeError, ValueError, IndexError):
            raise ParseError(f"{where}: expected [i, j, a, b, t]") from None
        for o in (i, j):
            occ(o, where)
        for v in (a, b):
            vir(v, where)
        try:
            i, j, a, b, t = canonical_double(i, j, a, b, t)
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from None
        if (i, j, a, b) in doubles:
            raise ParseError(f"{where}: duplicate double")
        doubles[(i, j, a, b)] = t

    return CCAmplitudes(
        nso,
        nel,
        tuple((i, a, t) for (i, a), t in sorted(singles.items())),
        tuple((*k, t) for k, t in sorted(doubles.items())),
        meta,
    )
