"""Shot-based post-selection versus the exact success probability.

Runs the H4 circuit with repeated shots and reports how far the observed
acceptance rate sits from the exact value in units of the binomial
standard error.
"""

import math

from nucc.builder import ExcitationTerm, assemble_circuit, block_circuit, plan_state_prep
from nucc.datasets import load_molecule
from nucc.simulator import StateVector, run_postselected, run_sampled

circ = assemble_circuit(plan_state_prep(load_molecule("h4").amplitudes))
p = run_postselected(circ).success_probability
print(f"exact success probability {p:.5f}")

for seed in range(5):
    rec = run_sampled(circ, None, seed=seed, shots=10_000)
    sigma = math.sqrt(p * (1 - p) / rec.shots)
    print(f"seed {seed}: {rec.successes}/{rec.shots} = {rec.success_rate:.4f}  z = {(rec.success_rate - p) / sigma:+.2f}")

# Failure probability of one block grows linearly with the amplitude:
# 1 - p = 2|alpha| / (1 + |alpha|)^2 when T|ref> is orthogonal to |ref>.
print("\n  alpha    1-p     (1-p)/alpha")
for alpha in (0.01, 0.02, 0.05, 0.1, 0.2):
    term = ExcitationTerm((2, 3), (0, 1), alpha)
    fail = 1 - run_postselected(block_circuit(term, 4), StateVector.basis(4, 0b0011)).success_probability
    print(f"  {alpha:5.2f}  {fail:.5f}  {fail / alpha:.4f}")
