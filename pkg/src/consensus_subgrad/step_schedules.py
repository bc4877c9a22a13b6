"""Per-agent step sizes ``Delta(t) = diag(delta_1(t), ..., delta_N(t))`` and a
numerical audit of the summability conditions they must meet.

Power laws are evaluated at ``(t + 1) ** alpha`` so that ``t = 0`` is finite.
Matrix norms of ``Delta(t)`` are infinity norms, i.e. ``max_i delta_i(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HorizonExceeded, NonpositiveDenominator

RULES = ("common_power", "pi_scaled_power", "pi_scaled_perturbed", "per_agent_explicit")
POWER_RULES = RULES[:3]


@dataclass(frozen=True, eq=False)
class StepSchedule:
    rule: str
    n: int
    c: float = 1.0
    alpha: float = -0.75
    abs_prob: object = field(default=None, repr=False)
    eps0: np.ndarray | None = None
    rho: float = 0.0
    table: np.ndarray | None = field(default=None, repr=False)

    def base(self, t: int) -> float:
        """The agent-independent factor ``c * (t+1)**alpha``."""
        return self.c * (t + 1.0) ** self.alpha

    def _eps(self, t):
        if self.eps0 is None:
            return np.zeros(self.n)
        return self.eps0 * self.rho ** t

    def _denominator(self, t):
        den = self.abs_prob.at(t + 1) + self._eps(t)
        if np.any(den <= 0):
            i = int(np.argmin(den))
            raise NonpositiveDenominator(f"pi_{i}({t + 1}) + eps_{i}({t}) = {den[i]!r}")
        return den

    def delta_at(self, t: int) -> np.ndarray:
        if t < 0:
            raise ValueError("t must be nonnegative")
        if self.rule == "common_power":
            return np.full(self.n, self.base(t))
        if self.rule in ("pi_scaled_power", "pi_scaled_perturbed"):
            return self.base(t) / self._denominator(t)
        if t >= len(self.table):
            raise HorizonExceeded(f"explicit step table has {len(self.table)} rows, t={t}")
        return self.table[t]

    __call__ = delta_at

    def weighted_at(self, t: int, pi_next: np.ndarray) -> np.ndarray:
        """``pi_i(t+1) * delta_i(t)``.

        For the pi-scaled rules this is formed as ``base * pi / (pi + eps)``,
        which is exactly ``base`` when ``eps = 0``.
        """
        if self.rule in ("pi_scaled_power", "pi_scaled_perturbed"):
            pi = self.abs_prob.at(t + 1)
            return self.base(t) * (pi / self._denominator(t))
        return pi_next * self.delta_at(t)


def common_power(c: float, alpha: float, n: int) -> StepSchedule:
    return StepSchedule("common_power", n, c=c, alpha=alpha)


def pi_scaled_power(c: float, alpha: float, abs_prob) -> StepSchedule:
    """``delta_i(t) = c (t+1)^alpha / pi_i(t+1)``."""
    return StepSchedule("pi_scaled_power", abs_prob.n, c=c, alpha=alpha, abs_prob=abs_prob)


def perturbed_schedule(c: float, alpha: float, eps0, rho: float, abs_prob,
                       horizon: int | None = None) -> StepSchedule:
    """``delta_i(t) = c (t+1)^alpha / (pi_i(t+1) + eps0_i rho^t)``.

    Denominators are checked for positivity up to ``horizon`` (default: the
    horizon of ``abs_prob``).
    """
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    eps0 = np.broadcast_to(np.asarray(eps0, dtype=float), (abs_prob.n,)).copy()
    sched = StepSchedule("pi_scaled_perturbed", abs_prob.n, c=c, alpha=alpha,
                         abs_prob=abs_prob, eps0=eps0, rho=rho)
    if horizon is None:
        horizon = abs_prob.horizon
    for t in range(horizon):
        sched._denominator(t)
    return sched


def per_agent_explicit(table) -> StepSchedule:
    table = np.array(table, dtype=float)
    if table.ndim != 2:
        raise ValueError("step table must be 2-D (time x agent)")
    if np.any(table < 0):
        raise ValueError("step sizes must be nonnegative")
    table.setflags(write=False)
    return StepSchedule("per_agent_explicit", table.shape[1], table=table)


@dataclass(frozen=True)
class AssumptionAudit:
    a2_partial_sum: float
    a2_verdict: str
    a3_divergence_proxy: float
    a3_divergence_verdict: str
    a3_sqrt_t_sum: float
    a3_sqrt_t_sum_same_index: float
    horizon: int
    notes: str = ""


def a3_terms(s: StepSchedule, abs_prob, horizon: int, same_index: bool = False) -> np.ndarray:
    """``max_{i,j} |pi_i delta_i(t) - pi_j delta_j(t)|`` for ``t < horizon``.

    By default pi is taken at ``t+1``; ``same_index=True`` uses ``pi(t)``
    instead.
    """
    out = np.empty(horizon)
    for t in range(horizon):
        if same_index:
            w = abs_prob.at(t) * s.delta_at(t)
        else:
            w = s.weighted_at(t, abs_prob.at(t + 1))
        out[t] = w.max() - w.min()
    return out


def audit_assumptions(s: StepSchedule, abs_prob, horizon: int) -> AssumptionAudit:
    """Partial sums of the A2/A3 series up to ``horizon`` plus analytic verdicts.

    Power-law rules are classified in closed form (p-series: A2 needs
    ``2 alpha < -1``, divergence of the A3 sum needs ``alpha >= -1``); other
    rules only get partial sums and the verdict ``numeric_only``.
    """
    if horizon < 10:
        raise ValueError("horizon must be at least 10")
    norms = np.array([s.delta_at(t).max() for t in range(horizon)])
    suffix_max = np.maximum.accumulate(norms[::-1])[::-1]
    a2 = float(np.sum(norms * suffix_max))
    a3_div = float(sum(np.abs(s.weighted_at(t, abs_prob.at(t + 1))).sum() for t in range(horizon)))
    sqrt_t = np.sqrt(np.arange(horizon))
    terms = a3_terms(s, abs_prob, horizon)
    a3_sqrt = float(np.sum(sqrt_t * terms))
    a3_sqrt_alt = float(np.sum(sqrt_t * a3_terms(s, abs_prob, horizon, same_index=True)))

    notes = []
    if s.rule in POWER_RULES and s.c > 0:
        a2_verdict = "analytic_pass" if 2 * s.alpha < -1 else "analytic_fail"
        a3_verdict = "analytic_pass" if s.alpha >= -1 else "analytic_fail"
    else:
        a2_verdict = a3_verdict = "numeric_only"
        notes.append(f"suffix sup truncated at t={horizon}; tail unaudited")
    nz = terms[terms > 0]
    if nz.size >= 2:
        notes.append(f"sqrt-t term ratio at tail {nz[-1] / nz[-2]:.6g}")
    elif nz.size == 0:
        notes.append("sqrt-t terms identically zero")
    return AssumptionAudit(a2, a2_verdict, a3_div, a3_verdict, a3_sqrt, a3_sqrt_alt, horizon,
                           "; ".join(notes))
