"""A primitive matrix with no self-loops: A1 holds, A1' does not.

The 4x4 matrix below has an all-zero diagonal, so any condition that asks for
positive self-weights rejects it.  Its powers still become entrywise positive
(A1 with window T), the ergodicity coefficient of the backward products decays
geometrically, and the absolute probability vector is well defined.

Run: python3 demos/separation_example.py
"""

from consensus_subgrad import (
    MatrixSequence,
    check_A1,
    check_A1_prime,
    compute_abs_prob,
    implication_demo,
    tau_decay_profile,
)
from consensus_subgrad.sequences import lazy, separation_example

p = separation_example()
seq = MatrixSequence.constant(p)
print("P =\n", p)

a1 = check_A1(seq)
a1p = check_A1_prime(seq)
print(f"\nA1 : holds={a1.holds}  witness T={a1.witness_T}  p+={a1.p_plus}")
print(f"A1': holds={a1p.holds}  reason: {a1p.failure_reason}")

# tau(P^t) reaches zero only in the limit; the A1 window gives the rate
print("\nt    tau(P(t,0))")
for t, tau in tau_decay_profile(seq, 36)[::6]:
    print(f"{t:<4d} {tau:.3e}")

ap = compute_abs_prob(seq, 10, a1)
print(f"\npi = {ap.at(0)}  (lower bound (p+)^T = {a1.p_plus ** a1.witness_T:.4f})")

# adding self-loops makes both conditions hold, so A1' is the narrower one
print("\nimplication table:")
for name, s in (("P", seq), ("(I+P)/2", MatrixSequence.constant(lazy(p)))):
    reports = implication_demo(s)
    print(f"  {name:8s} A1={reports['a1'].holds}  A1'={reports['a1prime'].holds}")
