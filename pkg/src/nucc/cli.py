"""Command-line front end: ``nucc {prepare,simulate,resources,spectrum}``.

Every command writes its results into ``--out`` and echoes the main document
to stdout. Exit codes: 0 success, 2 usage, 3 input/parse failure,
4 zero-probability branch, 5 eigensolver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import resources as res
from .builder import ancilla_count, assemble_circuit, plan_state_prep
from .chemio import (
    CCAmplitudes,
    HamiltonianSpec,
    ParseError,
    build_qubit_hamiltonian,
    parse_amplitudes,
    parse_fcidump,
    parse_pauli_hamiltonian,
)
from .simulator import (
    ORACLE_LIMIT,
    ConvergenceError,
    StateVector,
    ZeroProbabilityError,
    expectation,
    ground_overlap,
    ground_state,
    run_postselected,
    run_sampled,
)

log = logging.getLogger("nucc")

EXIT_PARSE, EXIT_PHYSICS, EXIT_CONVERGENCE = 3, 4, 5


def _epsilons(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}") from None
    if not values or not all(0 < v < 1 for v in values):
        raise argparse.ArgumentTypeError("epsilon values must lie in (0, 1)")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nucc", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hamiltonian", type=Path, help="Hamiltonian file")
    common.add_argument("--format", choices=("fcidump", "pauli"), default="fcidump")
    common.add_argument("--amplitudes", type=Path, help="CC amplitude file (JSON)")
    common.add_argument("--electrons", type=int, help="electron count for Pauli-format Hamiltonians")
    common.add_argument("--threshold", type=float, default=1e-8, help="drop |amplitude| below this")
    common.add_argument("--epsilon", type=_epsilons, default=[0.1, 0.001], help="comma-separated list")
    common.add_argument("--mode", choices=("postselect", "sample"), default="postselect")
    common.add_argument("--shots", type=int, default=10_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cc-energy", type=float, help="classical CC energy to compare against")
    common.add_argument("--no-reuse", action="store_true", help="fresh ancillas for every block")
    common.add_argument("--out", type=Path, default=Path("nucc-out"))
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("prepare", parents=[common], help="build the state-preparation circuit")
    sub.add_parser("simulate", parents=[common], help="run the circuit and evaluate the state")
    p = sub.add_parser("resources", parents=[common], help="CNOT/T estimates versus UCCSD")
    p.add_argument("--molecule", default=None, help="reference molecule name(s), comma-separated, or 'all'")
    p.add_argument("--orbitals", type=int, help="spin-orbital count for an ad-hoc query")
    p.add_argument("--t-convention", choices=("formula", "tabulated"), default="formula")
    sub.add_parser("spectrum", parents=[common], help="exact ground state and overlaps")
    return parser


# ---------------------------------------------------------------------------
# input loading


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def load_hamiltonian(args) -> tuple[HamiltonianSpec, int | None]:
    """Return the Hamiltonian and the spin-up electron count when known."""
    if args.hamiltonian is None:
        raise ParseError("--hamiltonian is required for this command")
    text = _read(args.hamiltonian)
    try:
        if args.format == "fcidump":
            ints = parse_fcidump(text)
            return build_qubit_hamiltonian(ints), (ints.n_electrons + ints.ms2) // 2
        return parse_pauli_hamiltonian(text, args.electrons or 0), None
    except ParseError as exc:
        raise ParseError(f"{args.hamiltonian}: {exc}") from None


def load_amplitudes(args, n_qubits: int | None = None, n_electrons: int | None = None) -> CCAmplitudes:
    if args.amplitudes is None:
        if n_qubits is None:
            raise ParseError("--amplitudes is required without a Hamiltonian")
        return CCAmplitudes(n_qubits, n_electrons or 0)
    try:
        amps = parse_amplitudes(_read(args.amplitudes))
    except ParseError as exc:
        raise ParseError(f"{args.amplitudes}: {exc}") from None
    if n_qubits is not None and amps.n_spin_orbitals != n_qubits:
        raise ParseError(f"amplitudes cover {amps.n_spin_orbitals} spin-orbitals, Hamiltonian has {n_qubits}")
    return amps


def _config(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _inputs(args):
    ham = n_alpha = None
    if args.hamiltonian is not None:
        ham, n_alpha = load_hamiltonian(args)
    amps = load_amplitudes(args, ham.n_qubits if ham else None, ham.n_electrons if ham else None)
    if ham is not None and ham.n_electrons != amps.n_electrons:
        ham = ham.with_electrons(amps.n_electrons)
    return ham, n_alpha, amps


# ---------------------------------------------------------------------------
# commands


def cmd_prepare(args) -> dict:
    _, _, amps = _inputs(args)
    plan = plan_state_prep(amps, args.threshold)
    circ = assemble_circuit(plan, reuse_ancillas=not args.no_reuse)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "circuit.txt").write_text(circ.to_text())
    (args.out / "circuit.json").write_text(circ.to_json())
    with open(args.out / "plan.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["block", "term", "alpha", "theta", "sign_phase"])
        for k, (term, angle) in enumerate(plan.blocks):
            w.writerow([k, str(term), repr(term.amplitude), repr(angle.theta), angle.sign_phase])
    doc = {
        "command": "prepare",
        "n_blocks": len(plan.blocks),
        "n_system_qubits": plan.n_system_qubits,
        "n_ancilla_qubits": ancilla_count(plan, not args.no_reuse),
        "n_total_qubits": circ.n_qubits,
        "reference_occupation": plan.reference_occupation,
        "config": _config(args),
    }
    _write_json(args.out / "prepare.json", doc)
    return doc


def cmd_simulate(args) -> dict:
    ham, n_alpha, amps = _inputs(args)
    if ham is None:
        raise ParseError("--hamiltonian is required for simulate")
    plan = plan_state_prep(amps, args.threshold)
    circ = assemble_circuit(plan, reuse_ancillas=not args.no_reuse)
    result = run_postselected(circ)
    energy = expectation(result.final_state, ham.qubit_hamiltonian)
    doc: dict = {
        "command": "simulate",
        "energy": energy,
        "reference_energy": ham.reference_energy,
        "success_probability": result.success_probability,
        "per_block_probabilities": dict(zip(result.block_labels, result.per_block_probabilities)),
        "n_total_qubits": circ.n_qubits,
        "n_blocks": len(plan.blocks),
    }
    cc = args.cc_energy if args.cc_energy is not None else amps.cc_energy
    if cc is not None:
        doc["cc_reference_energy"] = cc
        doc["energy_delta"] = energy - cc
    if args.mode == "sample":
        shots = run_sampled(circ, None, args.seed, args.shots)
        p = result.success_probability
        sigma = float(np.sqrt(p * (1 - p) / shots.shots))
        doc["sampled"] = {
            "shots": shots.shots,
            "successes": shots.successes,
            "success_rate": shots.success_rate,
            "binomial_sigma": sigma,
            "z_score": (shots.success_rate - p) / sigma if sigma > 0 else 0.0,
        }
    if ham.n_qubits <= ORACLE_LIMIT:
        e0, _ = ground_state(ham.qubit_hamiltonian, ham.n_electrons, n_alpha)
        doc["ground_energy"] = e0
        doc["ground_overlap"] = ground_overlap(result.final_state, ham.qubit_hamiltonian, ham.n_electrons, n_alpha)
    doc["config"] = _config(args)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(args.out / "simulate.json", doc)
    return doc


def cmd_resources(args) -> dict:
    queries: list[tuple[str, int, int, list | None]] = []
    if args.molecule:
        names = list(res.REFERENCE_COUNTS) if args.molecule == "all" else args.molecule.split(",")
        for name in names:
            key = next((k for k in res.REFERENCE_COUNTS if k.lower() == name.lower()), None)
            if key is None:
                raise ParseError(f"unknown molecule {name!r}")
            (nso, nel), _, _ = res.REFERENCE_COUNTS[key]
            queries.append((key, nso, nel, None))
    elif args.amplitudes is not None:
        amps = load_amplitudes(args)
        plan = plan_state_prep(amps, args.threshold)
        queries.append((args.amplitudes.stem, amps.n_spin_orbitals, amps.n_electrons, plan.terms))
    elif args.orbitals is not None and args.electrons is not None:
        queries.append((f"n{args.orbitals}e{args.electrons}", args.orbitals, args.electrons, None))
    else:
        raise ParseError("resources needs --molecule, --amplitudes, or --orbitals with --electrons")

    reports = []
    for eps in args.epsilon:
        for name, nso, nel, terms in queries:
            q = res.ResourceQuery(nso, nel, eps, None if terms is None else tuple(terms), name)
            reports.append(res.report(q, args.t_convention))
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "resources.csv").write_text(res.to_csv(reports))
    with open(args.out / "ratios.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "epsilon", "n_excitations", "cnot_ratio", "t_ratio"])
        for r in reports:
            w.writerow([r.name, r.epsilon, r.n_excitations, r.cnot_ratio, r.t_ratio])
    doc = {
        "command": "resources",
        "rows": res.table_rows(reports),
        "conventions": reports[0].conventions if reports else dict(res.CONVENTIONS),
        "config": _config(args),
    }
    _write_json(args.out / "resources.json", doc)
    return doc


def cmd_spectrum(args) -> dict:
    ham, n_alpha = load_hamiltonian(args)
    if args.amplitudes is not None:
        amps = load_amplitudes(args, ham.n_qubits)
        ham = ham.with_electrons(amps.n_electrons)
    else:
        amps = None
    sector = ham.n_electrons if (args.format == "fcidump" or args.electrons is not None) else None
    if sector is None:
        n_alpha = None
    e0, _ = ground_state(ham.qubit_hamiltonian, sector, n_alpha)
    ref = StateVector.basis(ham.n_qubits, ham.reference_occupation)
    doc: dict = {
        "command": "spectrum",
        "ground_energy": e0,
        "n_qubits": ham.n_qubits,
        "sector": {"n_electrons": sector, "n_alpha": n_alpha},
        "reference_overlap": ground_overlap(ref, ham.qubit_hamiltonian, sector, n_alpha),
    }
    if amps is not None:
        plan = plan_state_prep(amps, args.threshold)
        state = run_postselected(assemble_circuit(plan, not args.no_reuse)).final_state
        doc["prepared_overlap"] = ground_overlap(state, ham.qubit_hamiltonian, sector, n_alpha)
        doc["prepared_energy"] = expectation(state, ham.qubit_hamiltonian)
    doc["config"] = _config(args)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(args.out / "spectrum.json", doc)
    return doc


COMMANDS = {"prepare": cmd_prepare, "simulate": cmd_simulate, "resources": cmd_resources, "spectrum": cmd_spectrum}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.mode == "sample" and args.shots < 1:
        print("error: sample mode needs --shots >= 1", file=sys.stderr)
        return 2
    try:
        doc = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ZeroProbabilityError as exc:
        print(f"zero-probability branch in {exc.block or 'circuit'}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    summary = {k: v for k, v in doc.items() if k not in ("config", "rows")}
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
