"""Convex per-agent costs with bounded subgradients and ground-truth minimizers.

Every subgradient returned here has L1 norm at most ``l_bound(i)``, and the
kink of ``|.|`` is resolved to 0 so results are deterministic.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .errors import OracleUnavailable


class ConvexProblem:
    """Base class: ``f(x) = sum_i f_i(x)`` over ``n`` agents in ``R^d``.

    Subclasses implement :meth:`cost`, :meth:`subgradients` and
    :meth:`l_bound`; :meth:`minimizer_oracle` is optional.
    """

    n: int
    d: int

    def cost(self, i: int, x) -> float:
        raise NotImplementedError

    def subgradients(self, X) -> np.ndarray:
        """Row ``i`` is a subgradient of ``f_i`` at ``X[i]``."""
        raise NotImplementedError

    def subgradient(self, i: int, x) -> np.ndarray:
        X = np.zeros((self.n, self.d))
        X[i] = x
        return self.subgradients(X)[i]

    def l_bound(self, i: int) -> float:
        raise NotImplementedError

    @property
    def l_max(self) -> float:
        return max(self.l_bound(i) for i in range(self.n))

    def local_costs(self, x) -> np.ndarray:
        return np.array([self.cost(i, x) for i in range(self.n)])

    def global_cost(self, x) -> float:
        return float(self.local_costs(x).sum())

    def minimizer_oracle(self) -> np.ndarray:
        raise OracleUnavailable(f"{type(self).__name__} has no registered minimizer oracle")

    def dist_to_argmin(self, x) -> float:
        """Infinity-norm distance from ``x`` to the oracle minimizer."""
        return float(np.abs(np.asarray(x) - self.minimizer_oracle()).max())

    def initial_states(self) -> np.ndarray:
        raise NotImplementedError


class L1MedianInstance(ConvexProblem):
    """``f_i(x) = ||x - c_i||_1``; the argmin is the box of coordinate-wise medians."""

    def __init__(self, anchors):
        a = np.array(anchors, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        self.anchors = a
        self.n, self.d = a.shape
        s = np.sort(a, axis=0)
        half = self.n // 2
        if self.n % 2:
            self.lower = self.upper = s[half]
        else:
            self.lower, self.upper = s[half - 1], s[half]

    @classmethod
    def random(cls, n, d, seed=0, scale=1.0):
        return cls(np.random.default_rng(seed).uniform(-scale, scale, (n, d)))

    def cost(self, i, x):
        return float(np.abs(np.asarray(x, dtype=float) - self.anchors[i]).sum())

    def local_costs(self, x):
        return np.abs(np.asarray(x, dtype=float)[None, :] - self.anchors).sum(axis=1)

    def subgradients(self, X):
        return np.sign(X - self.anchors)

    def l_bound(self, i):
        return float(self.d)

    def minimizer_oracle(self):
        """Midpoint of the median box (the unique median when N is odd)."""
        return 0.5 * (self.lower + self.upper)

    def dist_to_argmin(self, x):
        x = np.asarray(x, dtype=float)
        return float(np.abs(x - np.clip(x, self.lower, self.upper)).max())

    def initial_states(self):
        return self.anchors.copy()


class L1RegressionInstance(ConvexProblem):
    """``f_i(x) = |a_i^T x - b_i|``."""

    def __init__(self, a, b):
        self.a = np.array(a, dtype=float)
        self.b = np.array(b, dtype=float).reshape(-1)
        self.n, self.d = self.a.shape
        if self.b.size != self.n:
            raise ValueError("need one target per agent")
        self._xstar = None

    @classmethod
    def random(cls, n, d, seed=0, noise=0.1):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(n, d))
        return cls(a, a @ rng.normal(size=d) + noise * rng.laplace(size=n))

    def cost(self, i, x):
        return float(abs(self.a[i] @ np.asarray(x, dtype=float) - self.b[i]))

    def local_costs(self, x):
        return np.abs(self.a @ np.asarray(x, dtype=float) - self.b)

    def subgradients(self, X):
        r = np.einsum("ij,ij->i", self.a, X) - self.b
        return np.sign(r)[:, None] * self.a

    def l_bound(self, i):
        return float(np.abs(self.a[i]).sum())

    def minimizer_oracle(self):
        """Least-absolute-deviation fit as a linear program, then locally verified."""
        if self._xstar is None:
            n, d = self.n, self.d
            cost = np.r_[np.zeros(d), np.ones(n)]
            a_ub = np.block([[self.a, -np.eye(n)], [-self.a, -np.eye(n)]])
            b_ub = np.r_[self.b, -self.b]
            bounds = [(None, None)] * d + [(0, None)] * n
            res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
            if not res.success:
                raise OracleUnavailable(f"LP oracle failed: {res.message}")
            self._xstar = pattern_search(self.global_cost, res.x[:d])
        return self._xstar

    def initial_states(self):
        # each agent starts on its own zero-cost hyperplane
        nrm = np.einsum("ij,ij->i", self.a, self.a)
        return self.a * (self.b / nrm)[:, None]


class CustomProblem(ConvexProblem):
    """Problem assembled from callables.

    ``minimizer`` may be an explicit point, the string ``"pattern_search"``
    (compass search from the origin) or ``None`` (no oracle).
    """

    def __init__(self, costs, subgradients, l_bounds, d, minimizer=None, x0=None):
        self._costs = list(costs)
        self._subgradients = list(subgradients)
        self._l = [float(v) for v in l_bounds]
        self.n, self.d = len(self._costs), d
        self._minimizer = minimizer
        self._x0 = x0

    def cost(self, i, x):
        return float(self._costs[i](np.asarray(x, dtype=float)))

    def subgradients(self, X):
        return np.array([g(X[i]) for i, g in enumerate(self._subgradients)], dtype=float)

    def l_bound(self, i):
        return self._l[i]

    def minimizer_oracle(self):
        if self._minimizer is None:
            return super().minimizer_oracle()
        if isinstance(self._minimizer, str):
            self._minimizer = pattern_search(self.global_cost, np.zeros(self.d))
        return np.asarray(self._minimizer, dtype=float)

    def initial_states(self):
        if self._x0 is None:
            return np.zeros((self.n, self.d))
        return np.array(self._x0, dtype=float)


def is_local_minimum(f, x, step=1e-4, slack=1e-12, n_random=64, seed=0) -> bool:
    """True if no compass or random neighbour at distance ``step`` improves ``f`` by more than ``slack``."""
    x = np.asarray(x, dtype=float)
    fx = f(x)
    d = x.size
    dirs = np.vstack([np.eye(d), -np.eye(d)])
    rnd = np.random.default_rng(seed).normal(size=(n_random, d))
    dirs = np.vstack([dirs, rnd / np.linalg.norm(rnd, axis=1, keepdims=True)])
    return all(f(x + step * u) >= fx - slack for u in dirs)


def pattern_search(f, x0, step=1.0, min_step=1e-4, max_iter=1_000_000):
    """Compass search with step halving, finished by a random-direction check.

    When the local check at ``min_step`` finds an improving neighbour the
    search restarts from it, so the returned point passes
    :func:`is_local_minimum`.
    """
    x = np.asarray(x0, dtype=float).copy()
    d = x.size
    fx = f(x)
    dirs = np.vstack([np.eye(d), -np.eye(d)])
    rng = np.random.default_rng(0)
    h = step
    for _ in range(max_iter):
        moved = False
        for u in dirs:
            y = x + h * u
            fy = f(y)
            if fy < fx - 1e-15:
                x, fx, moved = y, fy, True
                break
        if moved:
            continue
        if h > min_step:
            h /= 2
            continue
        rnd = rng.normal(size=(256, d))
        rnd /= np.linalg.norm(rnd, axis=1, keepdims=True)
        better = [x + s * u for u in rnd for s in (min_step, min_step / 8)]
        vals = [f(y) for y in better]
        k = int(np.argmin(vals))
        if vals[k] < fx - 1e-12:
            x, fx, h = better[k], vals[k], step / 16
            continue
        return x
    raise RuntimeError("pattern search did not terminate")
