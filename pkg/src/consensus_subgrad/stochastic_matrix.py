"""Row/column-stochastic matrices, backward products and the ergodicity coefficient.

Matrices are stored densely as read-only ``numpy`` arrays.  Nothing in this
module ever renormalizes its input: a matrix that fails the stochasticity
test is an error, not something to repair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ColumnSumViolation,
    DimensionMismatch,
    EmptySequence,
    KindMismatch,
    NegativeEntry,
    RowSumViolation,
    StochasticityError,
    TimeOrder,
)

KINDS = ("row", "column", "doubly")

#: tolerance on freshly constructed matrices
CONSTRUCTION_TOL = 1e-12
#: looser tolerance for products, which accumulate roundoff
PRODUCT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """A validated, immutable stochastic matrix.

    Build instances with :func:`validate`; the constructor does not check.
    """

    entries: np.ndarray
    kind: str = "row"

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, StochasticMatrix):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.entries, other.entries)

    __hash__ = None

    @property
    def T(self) -> "StochasticMatrix":
        flipped = {"row": "column", "column": "row", "doubly": "doubly"}[self.kind]
        return _wrap(self.entries.T.copy(), flipped)

    def to_json(self) -> str:
        return matrix_to_json(self)


@dataclass(frozen=True)
class BackwardProduct:
    """``P(stop, start) = P(stop-1) ... P(start)``."""

    start: int
    stop: int
    matrix: StochasticMatrix = field(repr=False)


def _wrap(a, kind):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return StochasticMatrix(a, kind)


def _raw(m) -> np.ndarray:
    if isinstance(m, StochasticMatrix):
        return m.entries
    return np.asarray(m, dtype=float)


def validate(m, kind: str = "row", tol: float = CONSTRUCTION_TOL) -> StochasticMatrix:
    """Check that ``m`` is a square nonnegative ``kind``-stochastic matrix.

    Raises :class:`NegativeEntry`, :class:`RowSumViolation` or
    :class:`ColumnSumViolation`; the sum violations report the worst
    offending row/column.
    """
    if kind not in KINDS:
        raise KindMismatch(f"unknown kind {kind!r}; expected one of {KINDS}")
    a = np.array(_raw(m), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise StochasticityError("matrix has non-finite entries")
    if np.any(a < 0):
        i, j = np.unravel_index(np.argmin(a), a.shape)
        raise NegativeEntry(int(i), int(j), float(a[i, j]))
    if kind in ("row", "doubly"):
        sums = a.sum(axis=1)
        worst = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[worst] - 1.0) > tol:
            raise RowSumViolation(worst, float(sums[worst]))
    if kind in ("column", "doubly"):
        sums = a.sum(axis=0)
        worst = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[worst] - 1.0) > tol:
            raise ColumnSumViolation(worst, float(sums[worst]))
    return _wrap(a, kind)


def is_stochastic(m, kind: str = "row", tol: float = CONSTRUCTION_TOL) -> bool:
    try:
        validate(m, kind, tol)
    except StochasticityError:
        return False
    return True


def validate_probability_vector(v, tol: float = CONSTRUCTION_TOL) -> np.ndarray:
    v = np.array(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"expected a nonempty vector, got shape {v.shape}")
    if np.any(v < 0):
        i = int(np.argmin(v))
        raise NegativeEntry(i, 0, float(v[i]))
    if abs(v.sum() - 1.0) > tol:
        raise StochasticityError(f"probability vector sums to {v.sum()!r}")
    v.setflags(write=False)
    return v


def _as_row_stochastic(p) -> np.ndarray:
    if isinstance(p, StochasticMatrix):
        if p.kind not in ("row", "doubly"):
            raise KindMismatch(f"expected a row-stochastic matrix, got kind {p.kind!r}")
        return p.entries
    return validate(p, "row", PRODUCT_TOL).entries


def ergodicity_coefficient(p) -> float:
    """Dobrushin coefficient: half the largest L1 distance between two rows.

    >>> ergodicity_coefficient([[1.0, 0.0], [0.5, 0.5]])
    0.5
    """
    a = _as_row_stochastic(p)
    return _tau(a)


def _tau(a: np.ndarray) -> float:
    # O(N^3) over row pairs; N is small here
    diffs = np.abs(a[:, None, :] - a[None, :, :]).sum(axis=2)
    return float(min(1.0, 0.5 * diffs.max()))


def tau_of_product_bound_check(p1, p2, slack: float = 1e-12) -> bool:
    """True iff tau(P1 P2) <= tau(P1) tau(P2) + slack."""
    a1, a2 = _as_row_stochastic(p1), _as_row_stochastic(p2)
    if a1.shape != a2.shape:
        raise DimensionMismatch(f"shapes {a1.shape} and {a2.shape} differ")
    return _tau(a1 @ a2) <= _tau(a1) * _tau(a2) + slack


def backward_product(seq, t0: int, t: int) -> BackwardProduct:
    """Return ``P(t, t0) = P(t-1) P(t-2) ... P(t0)``, with ``P(t0, t0) = I``."""
    if t < t0:
        raise TimeOrder(f"t={t} precedes t0={t0}")
    prod = np.eye(seq.n)
    for s in range(t0, t):
        prod = seq.at(s) @ prod
    return BackwardProduct(t0, t, validate(prod, seq.kind, PRODUCT_TOL))


def min_positive_entry(seq, t_probe: int | None = None) -> float:
    """Smallest positive entry over ``P(0) .. P(t_probe)``.

    Sequences with an exact probe horizon (constant, periodic, explicit) are
    scanned over that horizon when ``t_probe`` is omitted, which makes the
    result the exact infimum over all t.
    """
    if t_probe is None:
        horizon = seq.exact_horizon
        if horizon is None:
            raise ValueError("t_probe is required for sequences without an exact horizon")
        t_probe = horizon - 1
    if t_probe < 0:
        raise EmptySequence("probe window is empty")
    best = np.inf
    for t in range(t_probe + 1):
        a = seq.at(t)
        pos = a[a > 0]
        if pos.size:
            best = min(best, float(pos.min()))
    if not np.isfinite(best):
        raise EmptySequence("no positive entries in probe window")
    return best


def matrix_to_json(m, kind: str | None = None) -> str:
    if isinstance(m, StochasticMatrix):
        kind = kind or m.kind
    a = _raw(m)
    doc = {"n": int(a.shape[0]), "kind": kind or "row", "rows": [[float(x) for x in row] for row in a]}
    return json.dumps(doc)


def matrix_from_json(text: str) -> StochasticMatrix:
    doc = json.loads(text) if isinstance(text, str) else text
    m = validate(doc["rows"], doc.get("kind", "row"))
    if m.n != int(doc["n"]):
        raise DimensionMismatch(f"declared n={doc['n']} but rows give {m.n}")
    return m
