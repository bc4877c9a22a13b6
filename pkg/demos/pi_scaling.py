"""Why row-stochastic mixing needs pi-scaled step sizes.

With a row-stochastic P whose stationary vector pi is not uniform, the
iteration with a common step minimizes sum_i pi_i f_i instead of sum_i f_i.
Three agents with anchors 0, 1, 2 and pi = (0.6, 0.2, 0.2): the plain run
settles at the weighted median 0, while dividing each agent's step by N pi_i
recovers the true median 1.

Run: python3 demos/pi_scaling.py
"""

import numpy as np

from consensus_subgrad import (
    L1MedianInstance,
    MatrixSequence,
    check_A1,
    common_power,
    compute_abs_prob,
    pi_scaled_power,
    run_unified,
)
from consensus_subgrad.sequences import skewed_three

STEPS = 50_000

prob = L1MedianInstance([[0.0], [1.0], [2.0]])
seq = MatrixSequence.constant(skewed_three())
ap = compute_abs_prob(seq, 1, check_A1(seq))
pi = ap.at(0)
print(f"pi = {np.round(pi, 6)}, global argmin = {prob.minimizer_oracle()}")

runs = {
    "common step": run_unified(prob, seq, common_power(1, -0.75, 3), steps=STEPS),
    "pi-scaled": run_unified(prob, seq, pi_scaled_power(1, -0.75, ap), steps=STEPS),
}
print(f"\n{'t':>6}  " + "  ".join(f"{k + ' xbar':>16}" for k in runs))
for snaps in zip(*(r.snapshots for r in runs.values())):
    t = snaps[0].t
    if t and t & (t - 1) and t != STEPS:
        continue
    print(f"{t:>6}  " + "  ".join(f"{(pi @ s.state.x)[0]:16.6f}" for s in snaps))

for name, r in runs.items():
    row = r.final.diagnostics
    print(f"{name:12s} dist_to_argmin={row.dist_to_argmin:.3e}  "
          f"consensus={row.consensus_error:.3e}")
