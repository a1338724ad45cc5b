import math
from dataclasses import replace

import numpy as np
import pytest

from nucc.builder import (
    AngleSpec,
    BlockLayout,
    ExcitationTerm,
    StatePrepPlan,
    amplitude_to_angle,
    ancilla_count,
    assemble_circuit,
    block_circuit,
    build_excitation_block,
    build_fermionic_primitive,
    jw_structure,
    plan_from_terms,
    plan_state_prep,
)
from nucc.chemio import CCAmplitudes
from nucc.circuit import CircuitIR, Gate, MeasureOp
from nucc.fermion import jw_transform
from nucc.pauli import to_dense_matrix
from nucc.simulator import (
    StateVector,
    ZeroProbabilityError,
    branch_operator,
    oracle_product_state,
    run_postselected,
)
from oracles import apply_terms, random_state, random_term

SIGMA_PLUS = np.array([[0, 0], [1, 0]])  # (X - iY)/2
SIGMA_MINUS = np.array([[0, 1], [0, 0]])  # (X + iY)/2


def test_angle_examples():
    assert amplitude_to_angle(0).theta == 0
    assert amplitude_to_angle(1).theta == pytest.approx(math.pi / 2, abs=1e-15)
    angle = amplitude_to_angle(-0.05)
    assert angle.theta == pytest.approx(0.4399759547909189, abs=1e-12)
    assert math.tan(angle.theta / 2) ** 2 == pytest.approx(0.05, abs=1e-15)
    assert angle.sign_phase == math.pi
    assert amplitude_to_angle(0.3).sign_phase == 0


def test_angle_rejects_non_finite():
    with pytest.raises(ValueError):
        amplitude_to_angle(float("nan"))
    with pytest.raises(ValueError):
        AngleSpec(math.pi)


def _with_outcome(circ, outcome):
    steps = tuple(replace(s, desired_outcome=outcome) if isinstance(s, MeasureOp) else s for s in circ.steps)
    return CircuitIR(circ.n_qubits, steps, circ.ancilla_map)


@pytest.mark.parametrize("select_creation", [True, False])
def test_primitive_branch_operators(select_creation):
    circ = build_fermionic_primitive(0, 1, select_creation)
    first, second = (SIGMA_PLUS, SIGMA_MINUS) if select_creation else (SIGMA_MINUS, SIGMA_PLUS)
    np.testing.assert_allclose(branch_operator(_with_outcome(circ, 0)), first, atol=1e-12)
    np.testing.assert_allclose(branch_operator(_with_outcome(circ, 1)), second, atol=1e-12)


def test_primitive_on_basis_and_plus_states():
    circ = build_fermionic_primitive(0, 1, True)
    res = run_postselected(circ, StateVector.basis(1, 0))
    assert res.success_probability == pytest.approx(1.0, abs=1e-12)
    assert res.final_state.fidelity(StateVector.basis(1, 1)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ZeroProbabilityError) as exc:
        run_postselected(circ, StateVector.basis(1, 1))
    assert "primitive" in str(exc.value.block)
    plus = StateVector(1, np.array([1, 1]) / np.sqrt(2))
    res = run_postselected(circ, plus)
    assert res.success_probability == pytest.approx(0.5, abs=1e-12)
    assert res.final_state.fidelity(StateVector.basis(1, 1)) == pytest.approx(1.0, abs=1e-12)


def test_primitive_equal_indices():
    with pytest.raises(ValueError):
        build_fermionic_primitive(3, 3)


def test_term_validation():
    with pytest.raises(ValueError):
        ExcitationTerm((2, 2), (0, 1))
    with pytest.raises(ValueError):
        ExcitationTerm((2,), (2,))
    with pytest.raises(ValueError):
        ExcitationTerm((3, 2), (0, 1))
    with pytest.raises(ValueError):
        ExcitationTerm((), ())


def test_jw_structure_reproduces_transform():
    # sign * Z_zset * prod(sigma) must equal the JW image entry-wise
    for term in [ExcitationTerm((2,), (0,)), ExcitationTerm((5, 6), (0, 3)), ExcitationTerm((1, 4, 6), (0, 2, 5))]:
        n = 7
        sign, zset = jw_structure(term)
        dense = to_dense_matrix(jw_transform(term.fermion_product(), n))
        occ_from = sum(1 << a for a in term.annihilations)
        for spectators in range(1 << n):
            if spectators & (occ_from | sum(1 << c for c in term.creations)):
                continue
            k = spectators | occ_from
            out = spectators | sum(1 << c for c in term.creations)
            z = (-1) ** bin(spectators & sum(1 << s for s in zset)).count("1")
            assert dense[out, k] == pytest.approx(sign * z)


def test_layout_errors():
    term = ExcitationTerm((2, 3), (0, 1), 0.1)
    with pytest.raises(ValueError):
        BlockLayout(4, (4, 5))
    with pytest.raises(ValueError):
        build_excitation_block(term, amplitude_to_angle(0.1), BlockLayout(4, (5, 6, 7)))
    with pytest.raises(ValueError):
        build_excitation_block(term, amplitude_to_angle(0.1), BlockLayout(3, (5, 6, 7, 8)))


@pytest.mark.parametrize(
    "term",
    [ExcitationTerm((2,), (0,), 0.1), ExcitationTerm((2, 3), (0, 1), -0.12), ExcitationTerm((4, 5, 6), (0, 1, 3), 0.3)],
)
def test_block_kraus_operator_is_exact(term):
    n = 7
    theta = amplitude_to_angle(term.amplitude).theta
    t = to_dense_matrix(jw_transform(term.fermion_product(), n))
    expected = math.cos(theta / 2) ** 2 * (np.eye(1 << n) + term.amplitude * t)
    np.testing.assert_allclose(branch_operator(block_circuit(term, n)), expected, atol=1e-12)


def test_single_block_on_reference():
    term = ExcitationTerm((2,), (0,), 0.1)
    res = run_postselected(block_circuit(term, 4), StateVector.basis(4, 0b0011))
    oracle = oracle_product_state(0b0011, [(term, 0.1)], 4)
    assert 1 - res.final_state.fidelity(oracle) <= 1e-12
    # T|ref> is orthogonal to |ref>: (ref + alpha T ref)/sqrt(1 + alpha^2)
    ref = StateVector.basis(4, 0b0011).amplitudes
    t_ref = apply_terms(ref, [replace(term, amplitude=1.0)], 4) - ref
    closed = (ref + 0.1 * t_ref) / math.sqrt(1.01)
    assert abs(np.vdot(closed, res.final_state.amplitudes)) == pytest.approx(1.0, abs=1e-12)


def test_double_block_success_probability():
    term = ExcitationTerm((2, 3), (0, 1), -0.12)
    res = run_postselected(block_circuit(term, 4), StateVector.basis(4, 0b0011))
    oracle = oracle_product_state(0b0011, [(term, term.amplitude)], 4)
    assert 1 - res.final_state.fidelity(oracle) <= 1e-12
    theta = amplitude_to_angle(term.amplitude).theta
    raw = apply_terms(StateVector.basis(4, 0b0011).amplitudes, [term], 4)
    assert res.success_probability == pytest.approx(math.cos(theta / 2) ** 4 * np.vdot(raw, raw).real, abs=1e-12)


@pytest.mark.parametrize("alpha", [1e-4, 0.01, -0.05, 0.2])
def test_failure_probability_closed_form(alpha):
    # cos^2(theta/2) = 1/(1+|a|), so 1 - p = 2|a|/(1+|a|)^2 on a reference with T|ref> orthogonal
    term = ExcitationTerm((2, 3), (0, 1), alpha)
    p = run_postselected(block_circuit(term, 4), StateVector.basis(4, 0b0011)).success_probability
    a = abs(alpha)
    assert 1 - p == pytest.approx(2 * a / (1 + a) ** 2, rel=1e-9)


def test_zero_amplitude_block_is_identity(rng):
    psi = StateVector(4, random_state(rng, 4))
    term = ExcitationTerm((2,), (0,), 0.0)
    res = run_postselected(block_circuit(term, 4), psi)
    assert res.final_state.fidelity(psi) == pytest.approx(1.0, abs=1e-12)
    assert res.success_probability == pytest.approx(1.0, abs=1e-12)


def test_block_exactness_on_random_states(rng):
    for _ in range(40):
        n = int(rng.integers(6, 9))
        body = int(rng.integers(1, 4))
        term = random_term(rng, n, body)
        psi = random_state(rng, n)
        res = run_postselected(block_circuit(term, n), StateVector(n, psi))
        expected = apply_terms(psi, [term], n)
        expected /= np.linalg.norm(expected)
        assert 1 - abs(np.vdot(expected, res.final_state.amplitudes)) ** 2 <= 1e-10


def test_plan_examples():
    assert plan_state_prep(CCAmplitudes(4, 2)).blocks == ()
    amps = CCAmplitudes(4, 2, singles=((0, 2, 0.2), (1, 3, 1e-9)))
    assert len(plan_state_prep(amps, 1e-8).blocks) == 1
    amps = CCAmplitudes(4, 2, singles=((0, 2, 0.01), (1, 3, 0.02)), doubles=((0, 1, 2, 3, -0.1),))
    plan = plan_state_prep(amps, 0.0)
    assert len(plan.blocks) == 3
    assert [t.n_body for t in plan.terms] == [1, 1, 2]


def test_plan_ordering_and_threshold_enforced():
    t1, t2 = ExcitationTerm((2, 3), (0, 1), 0.1), ExcitationTerm((2,), (0,), 0.1)
    plan = plan_from_terms([t1, t2], 4, 0b0011)
    assert plan.terms == [t2, t1]
    with pytest.raises(ValueError):
        StatePrepPlan(4, 0b0011, ((t1, amplitude_to_angle(0.1)), (t2, amplitude_to_angle(0.1))))
    with pytest.raises(ValueError):
        StatePrepPlan(4, 0b0011, ((t2, amplitude_to_angle(0.1)),), drop_threshold=0.5)


def test_empty_plan_circuit():
    circ = assemble_circuit(plan_from_terms([], 4, 0b0011))
    assert circ.n_qubits == 4
    assert circ.steps == (Gate("X", (0,)), Gate("X", (1,)))


def test_qubit_budget():
    terms = [ExcitationTerm((2,), (0,), 0.1), ExcitationTerm((3,), (1,), 0.1), ExcitationTerm((2, 3), (0, 1), 0.1)]
    plan = plan_from_terms(terms, 4, 0b0011)
    assert assemble_circuit(plan).n_qubits == 9
    assert ancilla_count(plan, reuse_ancillas=False) == 3 + 3 + 5
    assert assemble_circuit(plan, reuse_ancillas=False).n_qubits == 15
    with pytest.raises(ValueError):
        assemble_circuit(plan, n_system=5)


def test_reuse_and_fresh_ancillas_agree():
    terms = [ExcitationTerm((2,), (0,), 0.2), ExcitationTerm((3,), (1,), -0.1), ExcitationTerm((2, 3), (0, 1), 0.15)]
    plan = plan_from_terms(terms, 4, 0b0011)
    a = run_postselected(assemble_circuit(plan, True))
    b = run_postselected(assemble_circuit(plan, False))
    assert a.final_state.fidelity(b.final_state) == pytest.approx(1.0, abs=1e-12)
    assert a.success_probability == pytest.approx(b.success_probability, abs=1e-12)
