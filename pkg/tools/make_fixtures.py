"""Regenerate the molecular fixtures in ``src/nucc/data`` (needs pyscf).

For every molecule this writes ``<name>.fcidump`` (RHF/ROHF molecular-orbital
integrals, STO-3G, no frozen core) and ``<name>_amplitudes.json`` (CCSD
amplitudes on interleaved spin-orbitals plus HF/CCSD/FCI energies).

    python tools/make_fixtures.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from pyscf import ao2mo, cc, fci, gto, scf

OUT = Path(__file__).resolve().parents[1] / "src" / "nucc" / "data"


def _bent(center: str, arm: str, r: float, angle_deg: float) -> str:
    half = math.radians(angle_deg) / 2
    return (
        f"{center} 0 0 0; {arm} {r * math.sin(half):.8f} 0 {r * math.cos(half):.8f}; "
        f"{arm} {-r * math.sin(half):.8f} 0 {r * math.cos(half):.8f}"
    )


def _pyramid(center: str, r: float, angle_deg: float) -> str:
    # three arms with pairwise angle ``angle_deg`` around the z axis
    c = math.cos(math.radians(angle_deg))
    cos_t = math.sqrt((1 + 2 * c) / 3)
    sin_t = math.sqrt(1 - cos_t**2)
    atoms = [f"{center} 0 0 0"]
    for k in range(3):
        phi = 2 * math.pi * k / 3
        atoms.append(f"H {r * sin_t * math.cos(phi):.8f} {r * sin_t * math.sin(phi):.8f} {-r * cos_t:.8f}")
    return "; ".join(atoms)


# Experimental equilibrium geometries (Angstrom / degrees).
MOLECULES = {
    "h2": ("H 0 0 0; H 0 0 0.7414", 0),
    "h3": ("H 0 0 0; H 0 0 0.9; H 0 0 1.8", 1),
    "h4": ("H 0 0 0; H 0 0 0.9; H 0 0 1.8; H 0 0 2.7", 0),
    "lih": ("Li 0 0 0; H 0 0 1.5949", 0),
    "beh2": ("Be 0 0 0; H 0 0 1.3264; H 0 0 -1.3264", 0),
    "bh3": (_pyramid("B", 1.19, 120.0 - 1e-9), 0),
    "nh3": (_pyramid("N", 1.012, 106.67), 0),
    "h2o": (_bent("O", "H", 0.9578, 104.48), 0),
    "hf": ("F 0 0 0; H 0 0 0.9168", 0),
    "oh": ("O 0 0 0; H 0 0 0.9697", 1),
}


def spin_orbital_amplitudes(mycc, nocc_a: int, nocc_b: int):
    t1a, t1b = mycc.t1
    t2aa, t2ab, t2bb = mycc.t2

    def so(p: int, spin: int) -> int:
        return 2 * p + spin

    singles, doubles = [], []
    for spin, t1, nocc in ((0, t1a, nocc_a), (1, t1b, nocc_b)):
        for i, a in np.ndindex(t1.shape):
            singles.append([so(i, spin), so(nocc + a, spin), float(t1[i, a])])
    for spin, t2, nocc in ((0, t2aa, nocc_a), (1, t2bb, nocc_b)):
        no, nv = t2.shape[0], t2.shape[2]
        for i in range(no):
            for j in range(i + 1, no):
                for a in range(nv):
                    for b in range(a + 1, nv):
                        doubles.append([so(i, spin), so(j, spin), so(nocc + a, spin), so(nocc + b, spin), float(t2[i, j, a, b])])
    # t2ab[i, J, a, B] multiplies a+_a a+_B a_J a_i
    for i, J, a, B in np.ndindex(t2ab.shape):
        doubles.append([so(i, 0), so(J, 1), so(nocc_a + a, 0), so(nocc_b + B, 1), float(t2ab[i, J, a, B])])
    return singles, doubles


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (atom, spin) in MOLECULES.items():
        mol = gto.M(atom=atom, basis="sto-3g", spin=spin, verbose=0)
        mf = (scf.RHF(mol) if spin == 0 else scf.ROHF(mol)).run(conv_tol=1e-12)
        norb = mf.mo_coeff.shape[1]
        h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
        eri = ao2mo.restore(1, ao2mo.full(mol, mf.mo_coeff), norb)
        from pyscf.tools import fcidump

        fcidump.from_integrals(
            str(OUT / f"{name}.fcidump"), h1, eri, norb, mol.nelectron, mol.energy_nuc(), ms=spin, tol=1e-14
        )
        mycc = cc.UCCSD(mf)
        mycc.conv_tol = 1e-12
        mycc.conv_tol_normt = 1e-10
        mycc.max_cycle = 500
        mycc.kernel()
        nocc_a, nocc_b = mol.nelec
        singles, doubles = spin_orbital_amplitudes(mycc, nocc_a, nocc_b)
        efci = fci.FCI(mf).kernel()[0] if norb <= 8 else None
        doc = {
            "n_spin_orbitals": 2 * norb,
            "n_electrons": mol.nelectron,
            "singles": singles,
            "doubles": doubles,
            "molecule": name,
            "geometry": atom,
            "basis": "sto-3g",
            "hf_energy": float(mf.e_tot),
            "cc_energy": float(mycc.e_tot),
            "fci_energy": None if efci is None else float(efci),
        }
        (OUT / f"{name}_amplitudes.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(f"{name}: norb={norb} nelec={mol.nelectron} HF={mf.e_tot:.8f} CCSD={mycc.e_tot:.8f} FCI={efci}")


if __name__ == "__main__":
    main()
