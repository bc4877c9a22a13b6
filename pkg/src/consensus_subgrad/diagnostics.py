"""Per-snapshot measurements: consensus error, objective gap, state growth,
tau decay and the terms of the one-step descent inequality."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .stochastic_matrix import _tau

CSV_COLUMNS = ("t", "consensus_error", "objective_gap", "state_norm", "sqrt_t_ratio",
               "dist_to_argmin", "state_bound")


@dataclass(frozen=True)
class DiagnosticsRow:
    t: int
    consensus_error: float
    objective_gap: float
    state_norm: float
    sqrt_t_ratio: float
    dist_to_argmin: float = float("nan")
    state_bound: float = float("nan")
    tau_upto_t: float | None = None
    descent_terms: tuple | None = None

    def csv_values(self):
        return [self.t] + [repr(float(getattr(self, c))) for c in CSV_COLUMNS[1:]]


@dataclass
class DiagnosticsContext:
    """What :func:`measure` needs besides the states themselves.

    ``abs_prob`` is ignored for push-sum states, whose weights come from the
    masses.  Set ``tau_seq`` to also record ``tau(P(t, 0))`` (expensive).
    """

    problem: object
    abs_prob: object = None
    tau_seq: object = None
    x_star: np.ndarray | None = None
    _f_star: float | None = field(default=None, repr=False)
    _tau_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.x_star is None:
            try:
                self.x_star = self.problem.minimizer_oracle()
            except NotImplementedError:
                self.x_star = None
        if self.x_star is not None:
            self._f_star = self.problem.global_cost(self.x_star)

    def tau_upto(self, t):
        if self.tau_seq is None:
            return None
        # cache the running product so increasing t costs one multiply per step
        last_t, prod = self._tau_cache.get("state", (0, np.eye(self.tau_seq.n)))
        if t < last_t:
            last_t, prod = 0, np.eye(self.tau_seq.n)
        for s in range(last_t, t):
            prod = self.tau_seq.at(s) @ prod
        self._tau_cache["state"] = (t, prod)
        return _tau(prod)


def _iterates_and_weights(states, ctx):
    if hasattr(states, "y"):
        y = np.asarray(states.y)
        return states.z, y / y.sum(), None
    pi = ctx.abs_prob.at(states.t)
    pi_next = ctx.abs_prob.at(states.t + 1) if ctx.abs_prob.covers(states.t + 1) else None
    return states.x, pi, pi_next


def measure(states, ctx: DiagnosticsContext, delta=None, pi_next=None,
            state_bound: float = float("nan")) -> DiagnosticsRow:
    """Diagnostics of one snapshot.

    ``delta`` is the step vector applied at time ``t`` and ``pi_next`` the
    weight vector at ``t+1``; both are needed only for the descent-inequality
    terms.
    """
    x, pi, default_next = _iterates_and_weights(states, ctx)
    if pi_next is None:
        pi_next = default_next
    t = states.t
    xbar = x.T @ pi
    consensus = float(np.linalg.norm(x - xbar[None, :], axis=1).max())
    state_norm = float(np.abs(x).sum(axis=1).max())
    problem = ctx.problem
    if ctx.x_star is not None:
        gap = problem.global_cost(xbar) - ctx._f_star
        dist = max(problem.dist_to_argmin(xi) for xi in x)
    else:
        gap = dist = float("nan")
    terms = None
    if delta is not None and pi_next is not None and ctx.x_star is not None:
        terms = descent_terms(problem, x, pi, pi_next, np.asarray(delta), ctx.x_star)
    return DiagnosticsRow(
        t=t,
        consensus_error=consensus,
        objective_gap=float(gap),
        state_norm=state_norm,
        sqrt_t_ratio=float(state_norm / np.sqrt(t + 1.0)),
        dist_to_argmin=float(dist),
        state_bound=float(state_bound),
        tau_upto_t=ctx.tau_upto(t),
        descent_terms=terms,
    )


def descent_terms(problem, x, pi, pi_next, delta, u):
    """The four right-hand summands bounding ``||xbar(t+1) - u||^2 - ||xbar(t) - u||^2``.

    Returned in order: step-size term, objective term, weight-imbalance term,
    consensus term.
    """
    n = x.shape[0]
    xbar = x.T @ pi
    l = np.array([problem.l_bound(i) for i in range(n)])
    d_inf = float(delta.max())
    weighted = pi_next * delta
    step_term = d_inf ** 2 * l.max() ** 2
    obj_term = 2.0 / n * np.abs(weighted).sum() * float(
        (problem.local_costs(u) - problem.local_costs(xbar)).sum())
    imbalance = float(weighted.max() - weighted.min())
    imb_term = 2.0 * imbalance * float(l.sum()) * float(np.linalg.norm(xbar - u))
    cons_term = 4.0 * d_inf * float(np.sum(l * np.linalg.norm(x - xbar[None, :], axis=1)))
    return (float(step_term), float(obj_term), imb_term, cons_term)


def tau_decay_profile(seq, t_max: int) -> list[tuple[int, float]]:
    """``[(t, tau(P(t, 0))) for t = 0 .. t_max]``."""
    if t_max > 1000:
        raise ValueError("t_max is capped at 1000")
    prod = np.eye(seq.n)
    out = [(0, _tau(prod))]
    for t in range(1, t_max + 1):
        prod = seq.at(t - 1) @ prod
        out.append((t, _tau(prod)))
    return out


def diagnostics_csv(rows, key=None) -> str:
    """Diagnostics rows as CSV text; ``key`` prepends an ``algorithm`` column."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(CSV_COLUMNS)
    w.writerow((["algorithm"] if key is not None else []) + header)
    for row in rows:
        w.writerow(([key] if key is not None else []) + row.csv_values())
    return buf.getvalue()
