"""Absolute probability vectors of ergodic row-stochastic sequences.

A sequence of probability vectors ``pi(t)`` with ``pi(t+1)^T P(t) = pi(t)^T``
is computed in one of four ways:

``backward_limit``
    ``pi(horizon)`` is the common row of ``lim_t P(t, horizon)``, the product
    grown until its ergodicity coefficient is negligible; earlier vectors
    follow from ``pi(t)^T = pi(t+1)^T P(t)``.
``perron_power``
    constant sequences: power iteration on ``P^T``.
``uniform_doubly``
    doubly-stochastic sequences: ``pi(t) = 1/N``.
``pushsum_mass``
    sequences induced by push-sum, ``pi(t) = Y(t) / 1^T Y(0)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    HorizonExceeded,
    KindMismatch,
    MassMismatch,
    NoConvergence,
    NonpositiveMass,
    PreconditionA1,
)
from .sequences import MatrixSequence
from .stochastic_matrix import PRODUCT_TOL, _tau, validate

METHODS = ("backward_limit", "perron_power", "uniform_doubly", "pushsum_mass")


@dataclass(frozen=True, eq=False)
class AbsProbSequence:
    """``pi(0) .. pi(horizon)`` stacked as rows of ``vectors``.

    A ``stationary`` sequence has the same vector at every time and can be
    queried beyond ``horizon``.
    """

    horizon: int
    vectors: np.ndarray
    residuals: np.ndarray
    method: str
    stationary: bool = False
    tol: float = 1e-10
    factors_used: tuple = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    def at(self, t: int) -> np.ndarray:
        if self.stationary:
            return self.vectors[0]
        if not 0 <= t <= self.horizon:
            raise HorizonExceeded(f"pi({t}) requested but horizon is {self.horizon}")
        return self.vectors[t]

    __call__ = at

    def covers(self, t: int) -> bool:
        return self.stationary or 0 <= t <= self.horizon

    def to_csv(self, fh=None) -> str:
        """Columns ``t, pi_0 .. pi_{N-1}, residual``; the last row has no residual."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"pi_{i}" for i in range(self.n)] + ["residual"])
        for t in range(self.horizon + 1):
            res = repr(float(self.residuals[t])) if t < self.horizon else ""
            w.writerow([t] + [repr(float(x)) for x in self.vectors[t]] + [res])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def stationarity_residuals(seq, vectors) -> np.ndarray:
    """``||pi(t+1)^T P(t) - pi(t)^T||_1`` for consecutive rows of ``vectors``."""
    return np.array([
        np.abs(vectors[t + 1] @ seq.at(t) - vectors[t]).sum() for t in range(len(vectors) - 1)
    ])


def perron_vector(p, tol: float = 1e-12, max_iter: int = 100_000) -> np.ndarray:
    """Left Perron vector of a primitive row-stochastic matrix by power iteration."""
    p = np.asarray(p, dtype=float)
    v = np.full(p.shape[0], 1.0 / p.shape[0])
    for _ in range(max_iter):
        nxt = p.T @ v
        nxt /= nxt.sum()
        if np.abs(nxt - v).sum() < tol:
            return nxt
        v = nxt
    raise NoConvergence(f"power iteration did not settle within {max_iter} iterations")


def _backward_limit_vector(seq, t0, stop_tol, max_factors):
    prod = np.eye(seq.n)
    k = 0
    while _tau(prod) >= stop_tol:
        if k >= max_factors:
            raise NoConvergence(
                f"tau(P(t, {t0})) still >= {stop_tol:g} after {max_factors} factors"
            )
        prod = seq.at(t0 + k) @ prod
        k += 1
    return prod.mean(axis=0), k


def compute_abs_prob(seq: MatrixSequence, horizon: int, a1_report, tol: float = 1e-10,
                     method: str = "auto", max_factors: int | None = None) -> AbsProbSequence:
    """Absolute probability vectors for ``t = 0 .. horizon``.

    ``a1_report`` must be a holding A1 report for ``seq``; it supplies the
    witness T that bounds the number of factors multiplied per vector
    (``100 * T`` unless ``max_factors`` is given).
    """
    if a1_report is None or not a1_report.holds:
        raise PreconditionA1("an A1 report that holds is required")
    if seq.kind not in ("row", "doubly"):
        raise KindMismatch(f"expected a row-stochastic sequence, got kind {seq.kind!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method == "auto":
        if seq.is_doubly():
            method = "uniform_doubly"
        elif seq.is_constant:
            method = "perron_power"
        else:
            method = "backward_limit"
    n = seq.n

    if method == "uniform_doubly":
        vectors = np.full((horizon + 1, n), 1.0 / n)
        return AbsProbSequence(horizon, vectors, stationarity_residuals(seq, vectors), method,
                               stationary=seq.exact_horizon is not None, tol=tol)

    if method == "perron_power":
        if not seq.is_constant:
            raise ValueError("perron_power needs a constant sequence")
        pi = perron_vector(seq.at(0))
        vectors = np.tile(pi, (horizon + 1, 1))
        return AbsProbSequence(horizon, vectors, stationarity_residuals(seq, vectors), method,
                               stationary=True, tol=tol)

    if method != "backward_limit":
        raise ValueError(f"unknown method {method!r}")
    if max_factors is None:
        max_factors = 100 * a1_report.witness_T
    # rows of P(t, t0) lie within 2*tau of pi(t0) in L1, and two such errors
    # enter each residual, so stop well below tol
    stop_tol = tol / 10
    vectors = np.empty((horizon + 1, n))
    # one limit at the horizon, then pi(t)^T = pi(t+1)^T P(t) downwards; the
    # recursion is non-expansive in L1, so the anchor error never grows
    vectors[horizon], k = _backward_limit_vector(seq, horizon, stop_tol, max_factors)
    for t in range(horizon - 1, -1, -1):
        v = vectors[t + 1] @ seq.at(t)
        vectors[t] = v / v.sum()
    return AbsProbSequence(horizon, vectors, stationarity_residuals(seq, vectors), method,
                           tol=tol, factors_used=(k,))


def induced_row_stochastic(a, y_now, y_next):
    """``diag(y_next)^{-1} A diag(y_now)``, row-stochastic whenever ``y_next = A y_now``."""
    a = np.asarray(a, dtype=float)
    y_now = np.asarray(y_now, dtype=float)
    y_next = np.asarray(y_next, dtype=float)
    if np.any(y_now <= 0) or np.any(y_next <= 0):
        raise NonpositiveMass("mass vectors must be strictly positive")
    scale = max(1.0, float(np.abs(y_next).max()))
    gap = float(np.abs(a @ y_now - y_next).max())
    if gap > 1e-12 * scale:
        raise MassMismatch(f"y_next differs from A y_now by {gap:.3g}")
    return validate(a * y_now[None, :] / y_next[:, None], "row", PRODUCT_TOL)


def _check_column_kind(a_seq):
    if a_seq.kind not in ("column", "doubly"):
        raise KindMismatch(f"push-sum needs a column-stochastic sequence, got {a_seq.kind!r}")


def pushsum_masses(a_seq, y0, steps: int) -> np.ndarray:
    """Masses ``Y(0) .. Y(steps)`` under ``Y(t+1) = A(t) Y(t)``."""
    _check_column_kind(a_seq)
    y = np.array(y0, dtype=float)
    if np.any(y <= 0):
        raise NonpositiveMass("y0 must be strictly positive")
    out = np.empty((steps + 1, y.size))
    out[0] = y
    for t in range(steps):
        y = a_seq.at(t) @ y
        if np.any(y <= 0):
            i = int(np.argmin(y))
            raise NonpositiveMass(f"y_{i}({t + 1}) = {y[i]!r}; A({t}) has a zero row")
        out[t + 1] = y
    return out


def pushsum_abs_prob(a_seq, y0, horizon: int) -> AbsProbSequence:
    """``pi(t) = Y(t) / 1^T Y(0)`` with residuals against the induced ``P(t)``."""
    ys = pushsum_masses(a_seq, y0, horizon + 1)
    vectors = ys[: horizon + 1] / ys[0].sum()
    residuals = np.empty(horizon)
    for t in range(horizon):
        p = induced_row_stochastic(a_seq.at(t), ys[t], ys[t + 1]).entries
        residuals[t] = np.abs(vectors[t + 1] @ p - vectors[t]).sum()
    return AbsProbSequence(horizon, vectors, residuals, "pushsum_mass")


def pushsum_induced_sequence(a_seq, y0) -> MatrixSequence:
    """Row-stochastic sequence ``P(t) = diag(Y(t+1))^{-1} A(t) diag(Y(t))``.

    Masses and matrices are extended lazily and cached, so evaluation at any
    t is cheap after the first pass.
    """
    _check_column_kind(a_seq)
    ys = [np.array(y0, dtype=float)]
    if np.any(ys[0] <= 0):
        raise NonpositiveMass("y0 must be strictly positive")

    def mass(t):
        while len(ys) <= t:
            nxt = a_seq.at(len(ys) - 1) @ ys[-1]
            if np.any(nxt <= 0):
                raise NonpositiveMass(f"mass vanished at t={len(ys)}")
            ys.append(nxt)
        return ys[t]

    cache = {}

    def rule(t):
        if t not in cache:
            cache[t] = induced_row_stochastic(a_seq.at(t), mass(t), mass(t + 1)).entries
        return cache[t]

    seq = MatrixSequence.from_function(rule, a_seq.n, "row", name=f"induced({a_seq.name})")
    seq.mass = mass
    return seq
