"""Acceptance criteria, one or more tests per criterion.

Test names start with ``test_c<N><sub>_`` so the terminal summary in
``conftest.py`` can print one PASS/FAIL line per criterion. Tolerances are
pinned here and not loosened when a criterion fails.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from nucc import resources as res
from nucc.builder import (
    ExcitationTerm,
    assemble_circuit,
    block_circuit,
    build_fermionic_primitive,
    plan_from_terms,
    plan_state_prep,
)
from nucc.circuit import CircuitIR, MeasureOp
from nucc.fermion import FermionProduct, apply_fermion_product, jw_transform, number_operator
from nucc.pauli import PauliTermSum, apply_pauli_sum
from nucc.simulator import (
    StateVector,
    branch_operator,
    expectation,
    ground_overlap,
    ground_state,
    oracle_product_state,
    run_postselected,
    run_sampled,
)
from oracles import random_plan

SMALL = ("h2", "h3", "h4", "lih", "beh2", "h2o", "hf", "oh")
LARGE = ("bh3", "nh3")

# pinned tolerances
ORACLE_INFIDELITY = 1e-10
PRIMITIVE_ATOL = 1e-12
H2_ENERGY_TOL = 1e-6
H2_OVERLAP_MIN = 0.9999
H2_OVERLAP_TOL = 1e-4
H2_HF_OVERLAP, H2_HF_TOL = 0.993615, 5e-3
ENERGY_MATCH_TOL = 1e-9
SIGMA_BAND = 3.0
EXPONENT, EXPONENT_TOL = 2.0, 0.2
T_TOTAL_REL = 0.05
CNOT_REL = 0.15
T_REDUCTION, CNOT_REDUCTION, REDUCTION_TOL = 0.57, 0.28, 0.10
LEAKAGE_TOL = 1e-10
N_RANDOM = 200


def _random_plans():
    rng = np.random.default_rng(9001)
    return [random_plan(rng, max_system=8, max_blocks=6, bodies=(1, 2)) for _ in range(N_RANDOM)]


@pytest.fixture(scope="module")
def random_runs():
    out = []
    for plan, n_el in _random_plans():
        out.append((plan, n_el, run_postselected(assemble_circuit(plan))))
    return out


# -- 1 ---------------------------------------------------------------------


def test_c1_oracle_equivalence(random_runs, metric):
    worst = 0.0
    for plan, _, result in random_runs:
        assert plan.n_system_qubits <= 8 and 1 <= len(plan.blocks) <= 6
        assert all(abs(t.amplitude) <= 0.5 and t.n_body in (1, 2) for t in plan.terms)
        oracle = oracle_product_state(plan.reference_occupation, plan.oracle_blocks(), plan.n_system_qubits)
        worst = max(worst, 1 - result.final_state.fidelity(oracle))
    metric(f"{len(random_runs)} instances, worst infidelity {worst:.2e}")
    assert worst <= ORACLE_INFIDELITY


# -- 2 ---------------------------------------------------------------------


def _branch(circ, outcome):
    steps = tuple(replace(s, desired_outcome=outcome) if isinstance(s, MeasureOp) else s for s in circ.steps)
    return branch_operator(CircuitIR(circ.n_qubits, steps, circ.ancilla_map))


@pytest.mark.parametrize("select_creation", [True, False])
def test_c2_primitive_branches(select_creation, metric):
    creation = np.array([[0, 0], [1, 0]])  # (X - iY)/2
    annihilation = np.array([[0, 1], [0, 0]])  # (X + iY)/2
    circ = build_fermionic_primitive(0, 1, select_creation)
    b0, b1 = _branch(circ, 0), _branch(circ, 1)
    want0, want1 = (creation, annihilation) if select_creation else (annihilation, creation)
    err = max(np.abs(b0 - want0).max(), np.abs(b1 - want1).max())
    metric(f"max entry error {err:.1e}")
    assert err <= PRIMITIVE_ATOL


# -- 3 ---------------------------------------------------------------------


def test_c3_jw_algebra(metric):
    checked = 0
    for n in range(1, 7):
        ident = PauliTermSum.identity(n).terms
        for p in range(n):
            assert jw_transform(FermionProduct(((p, True), (p, True))), n).terms == {}
            for q in range(n):
                anti = jw_transform(FermionProduct(((p, False), (q, True))), n) + jw_transform(
                    FermionProduct(((q, True), (p, False))), n
                )
                # coefficient-level equality, no tolerance
                assert anti.terms == (ident if p == q else {})
                checked += 1
    metric(f"{checked} (p, q, n) anticommutators exact")


# -- 4 ---------------------------------------------------------------------


def test_c4_h2_end_to_end(molecule, metric):
    mol = molecule("h2")
    h = mol.hamiltonian.qubit_hamiltonian
    ref = mol.hamiltonian.reference_occupation
    e0, ground = ground_state(h, n_electrons=2)
    # amplitude of the double read off the exact ground state
    term = ExcitationTerm((2, 3), (0, 1), 1.0)
    sign, target = apply_fermion_product(term.fermion_product(), ref)
    alpha = float((ground.amplitudes[target] / ground.amplitudes[ref]).real / sign.real)
    plan = plan_from_terms([replace(term, amplitude=alpha)], 4, ref)
    circ = assemble_circuit(plan)
    state = run_postselected(circ).final_state
    energy = expectation(state, h)
    overlap = ground_overlap(state, h, 2)
    hf_overlap = ground_overlap(StateVector.basis(4, ref), h, 2)
    metric(f"alpha={alpha:.6f} dE={energy - e0:.2e} overlap={overlap:.6f} HF overlap={hf_overlap:.6f} qubits={circ.n_qubits}")
    assert abs(energy - e0) <= H2_ENERGY_TOL
    assert overlap >= H2_OVERLAP_MIN and abs(overlap - 1.0) <= H2_OVERLAP_TOL
    assert abs(hf_overlap - H2_HF_OVERLAP) <= H2_HF_TOL


# -- 5 ---------------------------------------------------------------------


def _energy_vs_oracle(mol):
    plan = plan_state_prep(mol.amplitudes)
    result = run_postselected(assemble_circuit(plan))
    h = mol.hamiltonian.qubit_hamiltonian
    energy = expectation(result.final_state, h)
    oracle = oracle_product_state(plan.reference_occupation, plan.oracle_blocks(), plan.n_system_qubits)
    return energy, expectation(oracle, h), result.success_probability


def _c5(molecule, names, metric):
    for name in names:
        mol = molecule(name)
        energy, oracle_energy, _ = _energy_vs_oracle(mol)
        delta = energy - mol.hamiltonian.cc_reference_energy
        metric(f"{name}: |E-E_oracle|={abs(energy - oracle_energy):.1e} E-E_CC={delta:+.2e}")
        assert abs(energy - oracle_energy) <= ENERGY_MATCH_TOL


def test_c5_energy_matches_oracle(molecule, metric):
    _c5(molecule, SMALL, metric)


@pytest.mark.slow
def test_c5_energy_matches_oracle_16_qubit_systems(molecule, metric):
    _c5(molecule, LARGE, metric)


# -- 6 ---------------------------------------------------------------------


def test_c6a_sampled_matches_exact(molecule, metric):
    circuits = [assemble_circuit(plan_state_prep(molecule(n).amplitudes)) for n in ("h2", "h3", "h4")]
    circuits += [assemble_circuit(p) for p, _ in _random_plans()[:5]]
    worst = 0.0
    for k, circ in enumerate(circuits):
        p = run_postselected(circ).success_probability
        rec = run_sampled(circ, None, seed=k, shots=10_000)
        z = abs(rec.success_rate - p) / math.sqrt(p * (1 - p) / rec.shots)
        worst = max(worst, z)
    metric(f"{len(circuits)} circuits, worst |z|={worst:.2f}")
    assert worst <= SIGMA_BAND


def test_c6b_failure_probability_exponent(metric):
    term = ExcitationTerm((2, 3), (0, 1), 1.0)
    alphas = np.linspace(0.01, 0.2, 20)
    fails = []
    for a in alphas:
        p = run_postselected(block_circuit(replace(term, amplitude=a), 4), StateVector.basis(4, 0b0011)).success_probability
        fails.append(1 - p)
    slope = np.polyfit(np.log(alphas), np.log(fails), 1)[0]
    metric(f"fitted exponent {slope:.3f} (target {EXPONENT} +/- {EXPONENT_TOL}); (1-p)/alpha at 0.01 = {fails[0] / alphas[0]:.3f}")
    assert abs(slope - EXPONENT) <= EXPONENT_TOL


def _c6c(molecule, names, metric):
    for name in names:
        p = run_postselected(assemble_circuit(plan_state_prep(molecule(name).amplitudes))).success_probability
        metric(f"{name}: {p:.4f}")
        assert 0 < p <= 1


def test_c6c_dataset_success_probabilities(molecule, metric):
    _c6c(molecule, SMALL, metric)


@pytest.mark.slow
def test_c6c_dataset_success_probabilities_16_qubit_systems(molecule, metric):
    _c6c(molecule, LARGE, metric)


# -- 7 ---------------------------------------------------------------------

EPSILONS = (0.1, 0.001)


@pytest.fixture(scope="module")
def reports():
    return {eps: [res.report(res.reference_query(name, eps)) for name in res.REFERENCE_COUNTS] for eps in EPSILONS}


def test_c7a_per_term_t_formulas(metric):
    for n in (1, 2, 3):
        for eps in EPSILONS:
            assert res.t_count_nonunitary(n, eps) == round(1.12 * math.log2(1 / eps) + 18 * n + 10.6)
            assert res.t_count_uccsd(n, eps) == round(2 ** (2 * n - 1) * (5.3 + 0.56 * math.log2(1 / eps)))
    metric("n=1..3 at both epsilons")


def test_c7b_h2_t_totals(reports, metric):
    _, (_, _, _, t01, t0001), _ = res.REFERENCE_COUNTS["H2"]
    got = {eps: next(r for r in reports[eps] if r.name == "H2").t_nonunitary for eps in EPSILONS}
    metric(f"eps=0.1: {got[0.1]} vs {t01}; eps=0.001: {got[0.001]} vs {t0001}")
    assert abs(got[0.1] - t01) <= T_TOTAL_REL * t01 + 1e-9
    assert abs(got[0.001] - t0001) <= T_TOTAL_REL * t0001 + 1e-9


def test_c7c_nonunitary_cnot_totals(reports, metric):
    misses = []
    for rep in reports[0.1]:
        ref = res.REFERENCE_COUNTS[rep.name][1][2]
        dev = rep.cnot_nonunitary / ref - 1
        metric(f"{rep.name} {rep.cnot_nonunitary}/{ref} ({dev:+.0%})")
        if abs(dev) > CNOT_REL:
            misses.append(rep.name)
    assert not misses, f"outside +/-{CNOT_REL:.0%}: {misses}"


def test_c7d_enumeration(metric):
    for name, ((nso, nel), (ns, nd, *_), _) in res.REFERENCE_COUNTS.items():
        terms = res.enumerate_excitations(nso, nel)
        assert (sum(t.n_body == 1 for t in terms), sum(t.n_body == 2 for t in terms)) == (ns, nd), name
    metric("all ten (N_singles, N_doubles) pairs")


def test_c7e_t_ratio_reduction(reports, metric):
    per_eps = {eps: res.mean_reduction([r.t_ratio for r in reports[eps]]) for eps in EPSILONS}
    avg = sum(per_eps.values()) / len(per_eps)
    metric(", ".join(f"eps={e}: {v:.1%}" for e, v in per_eps.items()) + f", average {avg:.1%} (target 57% +/- 10)")
    assert abs(avg - T_REDUCTION) <= REDUCTION_TOL


def test_c7f_cnot_ratio_reduction(reports, metric):
    red = res.mean_reduction([r.cnot_ratio for r in reports[0.1]])
    metric(f"average CNOT reduction {red:.1%} (target 28% +/- 10)")
    assert all(r.cnot_ratio <= 1 for r in reports[0.1])
    assert abs(red - CNOT_REDUCTION) <= REDUCTION_TOL


# -- 8 ---------------------------------------------------------------------


def test_c8_qubit_budget(molecule, metric):
    h2 = plan_state_prep(molecule("h2").amplitudes, 0.0)
    n_h2 = assemble_circuit(h2).n_qubits
    terms = [
        ExcitationTerm((a,), (i,), 0.01) for i in range(8) for a in range(8, 16) if i % 2 == a % 2
    ] + [ExcitationTerm((9, 10), (0, 7), 0.02), ExcitationTerm((12, 15), (3, 4), -0.03)]
    synth = plan_from_terms(terms, 16, (1 << 8) - 1)
    n_synth = assemble_circuit(synth).n_qubits
    metric(f"H2 {h2.n_system_qubits}->{n_h2}, synthetic {synth.n_system_qubits}->{n_synth}")
    assert (h2.n_system_qubits, n_h2) == (4, 9)
    assert (synth.n_system_qubits, n_synth) == (16, 21)


# -- 9 ---------------------------------------------------------------------


def test_c9_particle_number(random_runs, metric):
    worst = 0.0
    for plan, n_el, result in random_runs:
        psi = result.final_state.amplitudes
        n_op = number_operator(plan.n_system_qubits)
        leak = np.linalg.norm(apply_pauli_sum(n_op, psi) - n_el * psi)
        worst = max(worst, leak)
    metric(f"{len(random_runs)} states, worst leakage {worst:.1e}")
    assert worst <= LEAKAGE_TOL
