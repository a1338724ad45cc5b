"""Gate counts for the measurement-based and unitary approaches.

Counts CNOT and T gates for every singles-and-doubles excitation of the
bundled molecules. Two T-count conventions are shown: closed-form
per-term estimates and a rotation-synthesis table where each arbitrary
rotation costs ceil(5.3 + 0.56 log2(1/eps)) T gates.
"""

from nucc import resources as res

for convention in ("formula", "tabulated"):
    print(f"\nT convention: {convention}")
    print(f"{'mol':5s} {'eps':>6s} {'Ns':>4s} {'Nd':>5s} {'CNOT nu':>8s} {'CNOT ucc':>9s} {'T nu':>7s} {'T ucc':>8s} {'T ratio':>8s}")
    for eps in (0.1, 0.001):
        reps = [res.report(res.reference_query(name, eps), t_convention=convention) for name in res.REFERENCE_COUNTS]
        for r in reps:
            print(
                f"{r.name:5s} {eps:6g} {r.n_singles:4d} {r.n_doubles:5d} {r.cnot_nonunitary:8d} "
                f"{r.cnot_uccsd:9d} {r.t_nonunitary:7d} {r.t_uccsd:8d} {r.t_ratio:8.3f}"
            )
        t_red = res.mean_reduction([r.t_ratio for r in reps])
        c_red = res.mean_reduction([r.cnot_ratio for r in reps])
        print(f"mean reduction at eps={eps}: T {t_red:.1%}, CNOT {c_red:.1%}")
