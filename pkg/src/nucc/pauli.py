"""Pauli strings, weighted Pauli sums and their matrix realizations.

Qubit ``q`` is bit ``q`` of a statevector index (qubit 0 is least significant).
A Pauli word is written with qubit 0 first, so ``"ZZX"`` acts with ``X`` on
qubit 2.

Internally every string is held in symplectic form ``(x, z)`` with

    P(x, z) = i^{|x & z|} X^x Z^z,

which makes ``P(1, 1) = i X Z = Y`` and keeps every stored string Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np
import scipy.sparse as sp

DROP_TOLERANCE = 1e-12
DENSE_LIMIT = 12

_SYMBOLS = "IXZY"  # index = x_bit + 2 * z_bit
_PHASES = (1, 1j, -1, -1j)


def _popcount(v: int) -> int:
    return bin(v).count("1")


def word_to_xz(word: str) -> tuple[int, int]:
    x = z = 0
    for q, ch in enumerate(word):
        if ch == "X":
            x |= 1 << q
        elif ch == "Z":
            z |= 1 << q
        elif ch == "Y":
            x |= 1 << q
            z |= 1 << q
        elif ch != "I":
            raise ValueError(f"invalid Pauli symbol {ch!r} in {word!r}")
    return x, z


def xz_to_word(x: int, z: int, n_qubits: int) -> str:
    return "".join(_SYMBOLS[((x >> q) & 1) + 2 * ((z >> q) & 1)] for q in range(n_qubits))


def _mul_xz(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, int]:
    """Return ``(x, z, k)`` such that ``P1 P2 = i^k P(x, z)``."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    k = _popcount(x1 & z1) + _popcount(x2 & z2) - _popcount(x3 & z3) + 2 * _popcount(z1 & x2)
    return x3, z3, k % 4


@dataclass(frozen=True)
class PauliString:
    """A single Pauli word with a unit phase in {1, -1, i, -i}."""

    n_qubits: int
    ops: str
    phase: complex = 1

    def __post_init__(self) -> None:
        if len(self.ops) != self.n_qubits:
            raise ValueError(f"word {self.ops!r} does not have {self.n_qubits} symbols")
        word_to_xz(self.ops)
        if complex(self.phase) not in _PHASES:
            raise ValueError(f"phase must be one of 1, -1, i, -i; got {self.phase}")

    @classmethod
    def from_xz(cls, x: int, z: int, n_qubits: int, phase: complex = 1) -> PauliString:
        return cls(n_qubits, xz_to_word(x, z, n_qubits), phase)

    @property
    def xz(self) -> tuple[int, int]:
        return word_to_xz(self.ops)

    @property
    def weight(self) -> int:
        return sum(ch != "I" for ch in self.ops)

    def __mul__(self, other: PauliString) -> PauliString:
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch")
        x, z, k = _mul_xz(*self.xz, *other.xz)
        return PauliString.from_xz(x, z, self.n_qubits, self.phase * other.phase * _PHASES[k])

    def __str__(self) -> str:
        prefix = {1: "", -1: "-", 1j: "i", -1j: "-i"}[complex(self.phase)]
        return prefix + self.ops


class PauliTermSum:
    """Immutable weighted sum of phase-normalized Pauli strings.

    Coefficients with magnitude below ``DROP_TOLERANCE`` are discarded on
    construction, so the empty sum is the zero operator.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping | None = None) -> None:
        self.n_qubits = int(n_qubits)
        acc: dict[tuple[int, int], complex] = {}
        for key, coeff in (terms or {}).items():
            if isinstance(key, str):
                if len(key) != self.n_qubits:
                    raise ValueError(f"word {key!r} does not have {self.n_qubits} symbols")
                key = word_to_xz(key)
            elif isinstance(key, PauliString):
                if key.n_qubits != self.n_qubits:
                    raise ValueError("qubit-count mismatch")
                coeff = coeff * key.phase
                key = key.xz
            else:
                key = (int(key[0]), int(key[1]))
            acc[key] = acc.get(key, 0) + complex(coeff)
        limit = 1 << self.n_qubits
        for x, z in acc:
            if x >= limit or z >= limit:
                raise ValueError("Pauli string exceeds the register")
        self._terms = {k: v for k, v in acc.items() if abs(v) >= DROP_TOLERANCE}

    @classmethod
    def _raw(cls, n_qubits: int, terms: dict[tuple[int, int], complex]) -> PauliTermSum:
        out = cls.__new__(cls)
        out.n_qubits = n_qubits
        out._terms = {k: v for k, v in terms.items() if abs(v) >= DROP_TOLERANCE}
        return out

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliTermSum:
        return cls(n_qubits, {(0, 0): coeff})

    # -- inspection -------------------------------------------------------
    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in sorted(self._terms.items()):
            yield PauliString.from_xz(x, z, self.n_qubits), c

    def xz_items(self):
        return self._terms.items()

    @property
    def terms(self) -> dict[str, complex]:
        return {xz_to_word(x, z, self.n_qubits): c for (x, z), c in self._terms.items()}

    def coefficient(self, word: str) -> complex:
        return self._terms.get(word_to_xz(word), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def is_hermitian(self, atol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= atol for c in self._terms.values())

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*{p.ops}" for p, c in self) or "0"
        return f"PauliTermSum({self.n_qubits}, {body})"

    # -- algebra ----------------------------------------------------------
    def _check(self, other: PauliTermSum) -> None:
        if self.n_qubits != other.n_qubits:
            raise ValueError(f"qubit-count mismatch: {self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other: PauliTermSum) -> PauliTermSum:
        self._check(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return PauliTermSum._raw(self.n_qubits, acc)

    def __neg__(self) -> PauliTermSum:
        return PauliTermSum._raw(self.n_qubits, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: PauliTermSum) -> PauliTermSum:
        return self + (-other)

    def scale(self, factor: complex) -> PauliTermSum:
        return PauliTermSum._raw(self.n_qubits, {k: v * factor for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, PauliTermSum):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def adjoint(self) -> PauliTermSum:
        return PauliTermSum._raw(self.n_qubits, {k: v.conjugate() for k, v in self._terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliTermSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Matrix-free action on a statevector of length ``2**n_qubits``."""
        return apply_pauli_sum(self, vector)


def multiply(lhs: PauliTermSum, rhs: PauliTermSum) -> PauliTermSum:
    """Distributive product ``lhs @ rhs`` with like terms merged."""
    lhs._check(rhs)
    acc: dict[tuple[int, int], complex] = {}
    for (x1, z1), c1 in lhs._terms.items():
        for (x2, z2), c2 in rhs._terms.items():
            x, z, k = _mul_xz(x1, z1, x2, z2)
            acc[(x, z)] = acc.get((x, z), 0) + c1 * c2 * _PHASES[k]
    return PauliTermSum._raw(lhs.n_qubits, acc)


def _grouped_action(op: PauliTermSum):
    """Yield ``(x, values)`` with ``op|k> = sum_x values_x[k] |k ^ x>``.

    Strings sharing a flip mask ``x`` share a sparsity pattern, so they are
    summed into one value vector.
    """
    n = op.n_qubits
    k = np.arange(1 << n, dtype=np.int64)
    groups: dict[int, list[tuple[int, complex]]] = {}
    for (x, z), c in op._terms.items():
        groups.setdefault(x, []).append((z, c))
    for x, items in groups.items():
        vals = np.zeros(1 << n, dtype=np.complex128)
        for z, c in items:
            sign = 1.0 - 2.0 * (np.bitwise_count(k & z) & 1)
            vals += (c * _PHASES[_popcount(x & z) % 4]) * sign
        yield x, vals


def to_sparse_matrix(op: PauliTermSum) -> sp.csr_matrix:
    n = op.n_qubits
    dim = 1 << n
    k = np.arange(dim, dtype=np.int64)
    rows, cols, vals = [], [], []
    for x, v in _grouped_action(op):
        rows.append(k ^ x)
        cols.append(k)
        vals.append(v)
    if not vals:
        return sp.csr_matrix((dim, dim), dtype=np.complex128)
    m = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return m.tocsr()


def to_dense_matrix(op: PauliTermSum, limit: int = DENSE_LIMIT) -> np.ndarray:
    if op.n_qubits > limit:
        raise ValueError(f"{op.n_qubits} qubits exceeds the dense-matrix limit of {limit}")
    dim = 1 << op.n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    k = np.arange(dim)
    for x, v in _grouped_action(op):
        out[k ^ x, k] += v
    return out


def apply_pauli_sum(op: PauliTermSum, vector: np.ndarray) -> np.ndarray:
    vector = np.asarray(vector, dtype=np.complex128)
    if vector.shape != (1 << op.n_qubits,):
        raise ValueError("state dimension does not match the operator")
    out = np.zeros_like(vector)
    k = np.arange(vector.size)
    for x, v in _grouped_action(op):
        out[k ^ x] += v * vector
    return out
