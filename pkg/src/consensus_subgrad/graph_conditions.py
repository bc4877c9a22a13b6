"""Support digraphs of matrix sequences and decision procedures for the
mixing conditions used by the convergence theory.

Three conditions are checked:

* ``A1``      positive weights bounded below and ``P(t+T, t) > 0`` for every t;
* ``A1prime`` positive diagonals and strongly connected union graphs over
  windows of length ``t0``;
* ``A1star``  the column-stochastic analogue of ``A1`` (no zero rows and
  ``A(t+T-1) ... A(t) > 0``).

For constant, periodic and explicit (finite then held) sequences every verdict
is exact.  For seeded-random sequences only a finite probe window can be
inspected and the report says so.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import KindMismatch
from .stochastic_matrix import min_positive_entry


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    edges: frozenset

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {(i, j)} out of range for n={self.n}")

    @classmethod
    def from_adjacency(cls, adj) -> "DirectedGraph":
        adj = np.asarray(adj, dtype=bool)
        return cls(adj.shape[0], frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(adj))))

    def successors(self) -> list[list[int]]:
        out = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            out[i].append(j)
        return out

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        lines += [f"  {v};" for v in range(self.n)]
        lines += [f"  {i} -> {j};" for i, j in sorted(self.edges)]
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    holds: bool
    witness_T: int | None
    probe_window: int
    failure_reason: str = ""
    exact: bool = False
    p_plus: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = "exact" if self.exact else "on probe"
        return d


def graph_from_matrix(p) -> DirectedGraph:
    """Edge ``(i, j)`` iff ``p[i, j] > 0`` (exact threshold)."""
    return DirectedGraph.from_adjacency(np.asarray(p) > 0)


def strongly_connected_components(g: DirectedGraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative so deep graphs do not hit the recursion limit."""
    succ = g.successors()
    index = [None] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(g.n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, k = work.pop()
            if k == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            while k < len(succ[v]):
                w = succ[v][k]
                k += 1
                if index[w] is None:
                    work.append((v, k))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def strongly_connected(g: DirectedGraph) -> bool:
    return len(strongly_connected_components(g)) == 1


def _union_adjacency(seq, t, window):
    adj = np.zeros((seq.n, seq.n), dtype=bool)
    for s in range(t, t + window):
        adj |= seq.at(s) > 0
    return adj


def union_graph(seq, t: int, window: int) -> DirectedGraph:
    """Edge union of the support graphs of ``P(t) .. P(t+window-1)``."""
    if window < 1:
        raise ValueError("window must be at least 1")
    return DirectedGraph.from_adjacency(_union_adjacency(seq, t, window))


def _probe_times(seq, probe):
    horizon = seq.exact_horizon
    if horizon is not None:
        return horizon, True
    if probe is None:
        probe = 4 * (seq.declared_period or 1)
    if probe < 1:
        raise ValueError("probe must be at least 1")
    return probe, False


def first_positive_time(seq, t: int, T_max: int) -> int | None:
    """Smallest ``k <= T_max`` with ``P(t+k-1) ... P(t) > 0``, tracked on supports.

    Positivity of a product of nonnegative matrices depends only on the
    supports, so integer support products give an exact answer.
    """
    supp = np.eye(seq.n, dtype=np.int64)
    for k in range(1, T_max + 1):
        supp = ((seq.at(t + k - 1) > 0).astype(np.int64) @ supp > 0).astype(np.int64)
        if supp.all():
            return k
    return None


def _positivity_search(seq, condition, T_max, probe, prefix_failure=None):
    n_probe, exact = _probe_times(seq, probe)
    if T_max is None:
        T_max = seq.n ** 2
    if T_max < 1:
        raise ValueError("T_max must be at least 1")
    p_plus = min_positive_entry(seq, n_probe - 1 + T_max)
    if prefix_failure is not None:
        return ConditionReport(condition, False, None, n_probe, prefix_failure, exact, p_plus)
    witness = 0
    for t in range(n_probe):
        k = first_positive_time(seq, t, T_max)
        if k is None:
            reason = f"no T <= {T_max} with a positive product starting at t={t} on probe"
            return ConditionReport(condition, False, None, n_probe, reason, exact, p_plus)
        witness = max(witness, k)
    return ConditionReport(condition, True, witness, n_probe, "", exact, p_plus)


def check_A1(seq, T_max: int | None = None, probe: int | None = None) -> ConditionReport:
    """Search for ``T <= T_max`` such that every probed backward product of length T is positive."""
    return _positivity_search(seq, "A1", T_max, probe)


def check_A1_star(seq, T_max: int | None = None, probe: int | None = None) -> ConditionReport:
    if seq.kind not in ("column", "doubly"):
        raise KindMismatch(f"A1star needs a column-stochastic sequence, got kind {seq.kind!r}")
    n_probe, _ = _probe_times(seq, probe)
    failure = None
    for t in range(n_probe):
        rows = np.nonzero(~(seq.at(t) > 0).any(axis=1))[0]
        if rows.size:
            failure = f"zero row {int(rows[0])} in A({t})"
            break
    return _positivity_search(seq, "A1star", T_max, probe, failure)


def check_A1_prime(seq, t0_max: int | None = None, probe: int | None = None) -> ConditionReport:
    """Positive diagonals plus strongly connected window unions.

    ``witness_T`` holds the smallest window length ``t0`` that works.
    """
    n_probe, exact = _probe_times(seq, probe)
    if t0_max is None:
        t0_max = seq.n
    p_plus = min_positive_entry(seq, n_probe - 1 + t0_max)

    def fail(reason):
        return ConditionReport("A1prime", False, None, n_probe, reason, exact, p_plus)

    for t in range(n_probe):
        diag = np.diag(seq.at(t))
        zero = np.nonzero(~(diag > 0))[0]
        if zero.size:
            i = int(zero[0])
            return fail(f"zero diagonal entry: P({t})[{i},{i}] = 0")
    if not p_plus > 0:
        return fail("no positive lower bound on nonzero weights")
    for t0 in range(1, t0_max + 1):
        if all(strongly_connected(union_graph(seq, t, t0)) for t in range(n_probe)):
            return ConditionReport("A1prime", True, t0, n_probe, "", exact, p_plus)
    return fail(f"union graph not strongly connected for any window t0 <= {t0_max}")


def implication_demo(seq) -> dict:
    """Run both A1 and A1prime on one sequence, e.g. to exhibit that A1 is weaker."""
    return {"a1": check_A1(seq), "a1prime": check_A1_prime(seq)}
