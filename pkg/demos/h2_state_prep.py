"""Prepare the coupled-cluster state of H2 with measurement-based blocks.

Walks through the pipeline on the smallest molecule: load integrals and
amplitudes, build one block per excitation, simulate with post-selection,
and compare against exact diagonalization.
"""

from nucc.builder import assemble_circuit, plan_state_prep
from nucc.circuit import gate_census
from nucc.datasets import load_molecule
from nucc.simulator import StateVector, expectation, ground_overlap, ground_state, run_postselected

mol = load_molecule("h2")
h = mol.hamiltonian.qubit_hamiltonian
n_el = mol.hamiltonian.n_electrons

# H2 singles vanish by symmetry, so the default threshold leaves one double.
plan = plan_state_prep(mol.amplitudes)
for term, angle in plan.blocks:
    print(f"term {term}  alpha={term.amplitude:+.6f}  theta={angle.theta:.6f}")

circuit = assemble_circuit(plan)
print(f"\n{plan.n_system_qubits} system qubits -> {circuit.n_qubits} total")
print("census:", dict(sorted(gate_census(circuit).items())))

result = run_postselected(circuit)
energy = expectation(result.final_state, h)
e0, _ = ground_state(h, n_el)
ref = StateVector.basis(4, mol.hamiltonian.reference_occupation)

print(f"\nsuccess probability   {result.success_probability:.6f}")
print(f"prepared energy       {energy:.10f}")
print(f"exact ground energy   {e0:.10f}")
print(f"reference overlap     {ground_overlap(ref, h, n_el):.6f}")
print(f"prepared overlap      {ground_overlap(result.final_state, h, n_el):.6f}")
