"""Time-indexed sequences of stochastic matrices, plus a few standard topologies."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import EmptySequence, KindMismatch
from .stochastic_matrix import CONSTRUCTION_TOL, KINDS, is_stochastic, validate

RULES = ("constant", "periodic", "explicit", "seeded_random", "function")


@dataclass(frozen=True)
class RandomFamily:
    """Parameters of a seeded random topology family.

    Each time step draws an independent digraph where every off-diagonal edge
    is present with probability ``edge_prob``.  ``weights="uniform"`` spreads
    mass equally over the support, ``"random"`` draws weights from
    ``U(min_weight, 1)`` before normalizing.  Doubly-stochastic draws use
    Metropolis weights on a symmetric support.
    """

    n: int
    kind: str = "row"
    edge_prob: float = 0.5
    self_loops: bool = True
    weights: str = "uniform"
    min_weight: float = 0.1


@lru_cache(maxsize=8192)
def _random_matrix(family: RandomFamily, seed: int, t: int) -> np.ndarray:
    rng = np.random.default_rng([seed, t])
    n = family.n
    support = rng.random((n, n)) < family.edge_prob
    if family.kind == "doubly":
        support = np.triu(support, 1)
        support = support | support.T
        np.fill_diagonal(support, False)
        deg = support.sum(axis=1)
        w = np.where(support, 1.0 / (1 + np.maximum(deg[:, None], deg[None, :])), 0.0)
        np.fill_diagonal(w, 1.0 - w.sum(axis=1))
        a = w
    else:
        np.fill_diagonal(support, family.self_loops)
        empty = ~support.any(axis=1)
        support[empty, empty] = True
        if family.weights == "uniform":
            w = support.astype(float)
        elif family.weights == "random":
            w = np.where(support, rng.uniform(family.min_weight, 1.0, (n, n)), 0.0)
        else:
            raise ValueError(f"unknown weight scheme {family.weights!r}")
        a = w / w.sum(axis=1, keepdims=True)
        if family.kind == "column":
            a = a.T.copy()
    a.setflags(write=False)
    return a


class MatrixSequence:
    """A rule producing stochastic matrices ``P(t)``, ``t = 0, 1, 2, ...``.

    Use the classmethod constructors rather than ``__init__``.
    """

    def __init__(self, n, kind, rule, *, matrices=None, family=None, seed=None, func=None,
                 period=None, name=None):
        if kind not in KINDS:
            raise KindMismatch(f"unknown kind {kind!r}")
        if rule not in RULES:
            raise ValueError(f"unknown rule {rule!r}")
        self.n = int(n)
        self.kind = kind
        self.rule = rule
        self.matrices = matrices
        self.family = family
        self.seed = seed
        self.func = func
        self.declared_period = period
        self.name = name or rule

    # constructors -----------------------------------------------------------

    @classmethod
    def constant(cls, p, kind="row"):
        m = validate(p, kind).entries
        return cls(m.shape[0], kind, "constant", matrices=(m,), period=1)

    @classmethod
    def periodic(cls, ps: Sequence, kind="row"):
        ms = cls._validated_list(ps, kind)
        return cls(ms[0].shape[0], kind, "periodic", matrices=ms, period=len(ms))

    @classmethod
    def explicit(cls, ps: Sequence, kind="row"):
        """Use ``ps[t]`` for ``t < len(ps)`` and hold the last matrix afterwards."""
        ms = cls._validated_list(ps, kind)
        return cls(ms[0].shape[0], kind, "explicit", matrices=ms)

    @classmethod
    def seeded_random(cls, n, kind="row", seed=0, **family_params):
        family = RandomFamily(n=n, kind=kind, **family_params)
        return cls(n, kind, "seeded_random", family=family, seed=int(seed))

    @classmethod
    def from_function(cls, func: Callable[[int], np.ndarray], n, kind="row", name=None):
        """Wrap an arbitrary ``t -> matrix`` rule; every emitted matrix is validated."""
        return cls(n, kind, "function", func=func, name=name)

    @staticmethod
    def _validated_list(ps, kind):
        if len(ps) == 0:
            raise EmptySequence("matrix list is empty")
        ms = tuple(validate(p, kind).entries for p in ps)
        if len({m.shape for m in ms}) != 1:
            raise ValueError("matrices in a sequence must share one shape")
        return ms

    # evaluation -------------------------------------------------------------

    def at(self, t: int) -> np.ndarray:
        if t < 0:
            raise IndexError(f"negative time {t}")
        if self.rule == "constant":
            return self.matrices[0]
        if self.rule == "periodic":
            return self.matrices[t % len(self.matrices)]
        if self.rule == "explicit":
            return self.matrices[min(t, len(self.matrices) - 1)]
        if self.rule == "seeded_random":
            return _random_matrix(self.family, self.seed, int(t))
        return validate(self.func(t), self.kind).entries

    __call__ = at

    @property
    def exact_horizon(self) -> int | None:
        """Number of leading times that determine every backward product pattern.

        ``None`` for rules whose behaviour over all t cannot be enumerated.
        """
        if self.rule in ("constant", "periodic", "explicit"):
            return len(self.matrices)
        return None

    @property
    def is_constant(self) -> bool:
        return self.rule == "constant" or (
            self.rule in ("periodic", "explicit") and len(self.matrices) == 1
        )

    def is_doubly(self) -> bool:
        """True when every matrix is known to be doubly stochastic."""
        if self.kind == "doubly":
            return True
        if self.exact_horizon is None:
            return False
        return all(is_stochastic(m, "doubly", CONSTRUCTION_TOL) for m in self.matrices)

    def transpose(self) -> "MatrixSequence":
        flipped = {"row": "column", "column": "row", "doubly": "doubly"}[self.kind]
        if self.matrices is not None:
            ms = tuple(m.T.copy() for m in self.matrices)
            return MatrixSequence(self.n, flipped, self.rule, matrices=ms,
                                  period=self.declared_period, name=self.name)
        return MatrixSequence.from_function(lambda t: self.at(t).T, self.n, flipped,
                                            name=f"{self.name}^T")

    def __repr__(self):
        return f"MatrixSequence(n={self.n}, kind={self.kind!r}, rule={self.name!r})"


# standard topologies --------------------------------------------------------

def separation_example() -> np.ndarray:
    """Primitive 4x4 row-stochastic matrix with an all-zero diagonal."""
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.5, 0.0, 0.0, 0.5],
        [0.0, 0.0, 1.0, 0.0],
    ])


def uniform(n: int) -> np.ndarray:
    return np.full((n, n), 1.0 / n)


def cyclic_shift(n: int) -> np.ndarray:
    return np.roll(np.eye(n), 1, axis=1)


def lazy(p) -> np.ndarray:
    """``(I + P) / 2``; keeps the stationary vector and adds self-loops."""
    p = np.asarray(p, dtype=float)
    return 0.5 * (np.eye(p.shape[0]) + p)


def ring_metropolis(n: int) -> np.ndarray:
    """Doubly-stochastic undirected ring: weight 1/3 on self and both neighbours."""
    if n < 3:
        return uniform(n)
    a = np.zeros((n, n))
    for i in range(n):
        for j in (i - 1, i, i + 1):
            a[i, j % n] = 1.0 / 3.0
    return a


def skewed_three() -> np.ndarray:
    """Primitive row-stochastic 3x3 matrix with stationary vector (0.6, 0.2, 0.2)."""
    return np.array([
        [2 / 3, 1 / 6, 1 / 6],
        [0.5, 0.5, 0.0],
        [0.5, 0.0, 0.5],
    ])
