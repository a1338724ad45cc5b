"""Bundled STO-3G fixtures (integrals and CCSD amplitudes) for small molecules.

Generated by ``tools/make_fixtures.py``; every amplitude file also records
the HF, CCSD and FCI energies of its molecule.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .chemio import CCAmplitudes, HamiltonianSpec, MolecularIntegrals, build_qubit_hamiltonian, parse_amplitudes, parse_fcidump

MOLECULES = ("h2", "h3", "h4", "lih", "beh2", "bh3", "nh3", "h2o", "hf", "oh")


def fixture_path(filename: str) -> Path:
    return Path(str(resources.files("nucc") / "data" / filename))


@dataclass(frozen=True)
class Molecule:
    name: str
    integrals: MolecularIntegrals
    hamiltonian: HamiltonianSpec
    amplitudes: CCAmplitudes

    @property
    def n_alpha(self) -> int:
        return (self.integrals.n_electrons + self.integrals.ms2) // 2


def load_molecule(name: str) -> Molecule:
    name = name.lower()
    if name not in MOLECULES:
        raise KeyError(f"no fixture for {name!r}; available: {', '.join(MOLECULES)}")
    ints = parse_fcidump(fixture_path(f"{name}.fcidump").read_text())
    amps = parse_amplitudes(fixture_path(f"{name}_amplitudes.json").read_text())
    ham = build_qubit_hamiltonian(ints)
    ham = HamiltonianSpec(
        ham.qubit_hamiltonian, ham.n_qubits, ham.n_electrons, ham.reference_occupation,
        ham.reference_energy, amps.cc_energy,
    )
    return Molecule(name, ints, ham, amps)
