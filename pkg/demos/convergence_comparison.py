"""Five distributed subgradient methods on one problem, side by side.

Four agents hold L1 anchors in R^2 and talk over the zero-diagonal matrix P
(or its transpose for the push-sum variants).  Each specialized runner is
checked against its unified-iteration embedding, then run long enough to show
the distance to the argmin box and the consensus error shrinking.  DGD needs
a doubly-stochastic matrix, so it uses the Metropolis ring instead.

Run: python3 demos/convergence_comparison.py
"""

from consensus_subgrad import (
    AlgorithmInputs,
    L1MedianInstance,
    MatrixSequence,
    check_A1,
    common_power,
    compute_abs_prob,
    pi_scaled_power,
    run_algorithm,
    verify_embedding,
)
from consensus_subgrad.sequences import separation_example, ring_metropolis

STEPS = 20_000

prob = L1MedianInstance([[-1.0, -2.0], [1.0, 0.5], [-0.5, -1.0], [0.5, 2.0]])
p = separation_example()
seq = MatrixSequence.constant(p)
ap = compute_abs_prob(seq, 1, check_A1(seq))
ring = MatrixSequence.constant(ring_metropolis(4), "doubly")
col = MatrixSequence.constant(p.T, "column")
common = common_power(1.0, -0.75, 4)

cases = {
    "unified": AlgorithmInputs(prob, seq=seq, schedule=pi_scaled_power(1.0, -0.75, ap)),
    "dgd": AlgorithmInputs(prob, seq=ring, schedule=common),
    "dgd_post": AlgorithmInputs(prob, seq=ring, schedule=common),
    # the zero diagonal gives z_ii(t) = 0 for t < 6, so those steps are skipped
    "row_stochastic": AlgorithmInputs(prob, seq=seq, c=1.0, alpha=-0.75,
                                      skip_until_positive=True),
    "subgradient_push": AlgorithmInputs(prob, a_seq=col, c=1.0, alpha=-0.75),
    "push_first": AlgorithmInputs(prob, a_seq=col, c=1.0, alpha=-0.75),
}

print(f"argmin box: {prob.lower} .. {prob.upper}\n")
print(f"{'algorithm':17s} {'embedding':>10s} {'t':>7s} {'dist':>10s} {'consensus':>10s}")
for alg, inputs in cases.items():
    rep = verify_embedding(alg, inputs, 500)
    traj = run_algorithm(alg, inputs, STEPS, abs_prob=ap if alg == "unified" else None)
    for snap in traj.snapshots[-4:]:
        row = snap.diagnostics
        print(f"{alg:17s} {rep.max_deviation:10.1e} {row.t:7d} "
              f"{row.dist_to_argmin:10.2e} {row.consensus_error:10.2e}")
