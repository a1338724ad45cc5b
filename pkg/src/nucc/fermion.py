"""Fermionic ladder operators and the Jordan-Wigner transform.

Occupation encoding: qubit state ``|1>`` means the spin-orbital is occupied,
so ``a^dagger_p -> Z_0 ... Z_{p-1} (X_p - i Y_p) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .pauli import PauliTermSum, multiply


def _check_index(p: int, n: int) -> None:
    if not 0 <= p < n:
        raise IndexError(f"spin-orbital index {p} out of range for {n} qubits")


@lru_cache(maxsize=4096)
def _ladder(p: int, n: int, dagger: bool) -> PauliTermSum:
    _check_index(p, n)
    zstring = (1 << p) - 1
    bit = 1 << p
    ycoeff = -0.5j if dagger else 0.5j
    return PauliTermSum(n, {(bit, zstring): 0.5, (bit, zstring | bit): ycoeff})


def jw_creation(p: int, n: int) -> PauliTermSum:
    return _ladder(p, n, True)


def jw_annihilation(q: int, n: int) -> PauliTermSum:
    return _ladder(q, n, False)


@dataclass(frozen=True)
class FermionProduct:
    """Ordered product ``coefficient * f_1 f_2 ... f_k`` of ladder operators.

    Each factor is ``(orbital, dagger)``; the rightmost factor acts first.
    """

    factors: tuple[tuple[int, bool], ...]
    coefficient: complex = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple((int(p), bool(d)) for p, d in self.factors))
        for p, _ in self.factors:
            if p < 0:
                raise IndexError(f"negative spin-orbital index {p}")

    def adjoint(self) -> FermionProduct:
        return FermionProduct(
            tuple((p, not d) for p, d in reversed(self.factors)),
            complex(self.coefficient).conjugate(),
        )

    def __str__(self) -> str:
        body = " ".join(f"a{'+' if d else ''}_{p}" for p, d in self.factors)
        return f"{self.coefficient} {body}"


def jw_transform(prod: FermionProduct, n: int) -> PauliTermSum:
    out = PauliTermSum.identity(n, prod.coefficient)
    for p, dagger in prod.factors:
        out = multiply(out, _ladder(p, n, dagger))
        if out.is_zero():
            break
    return out


def number_operator(n: int) -> PauliTermSum:
    """JW image of the total particle number ``sum_p a^dagger_p a_p``."""
    total = PauliTermSum(n)
    for p in range(n):
        total = total + PauliTermSum(n, {(0, 0): 0.5, (0, 1 << p): -0.5})
    return total


def apply_fermion_product(prod: FermionProduct, occupation: int) -> tuple[complex, int]:
    """Act on an occupation-number basis state by the anticommutation sign rule.

    Returns ``(amplitude, occupation)``; amplitude 0 means the product
    annihilates the state. Independent of the Pauli route, used as an oracle.
    """
    amp = complex(prod.coefficient)
    occ = occupation
    for p, dagger in reversed(prod.factors):
        bit = 1 << p
        if bool(occ & bit) == dagger:
            return 0j, occ
        if bin(occ & (bit - 1)).count("1") % 2:
            amp = -amp
        occ ^= bit
    return amp, occ
