"""The unified iteration ``X(t+1) = P(t) X(t) - Delta(t) G(t)`` and the
specialized algorithms it contains.

Runners
-------
``run_unified``           the iteration itself, arbitrary row-stochastic P(t)
``run_dgd``               doubly-stochastic P(t), common step
``run_dgd_post``          descend first, then mix
``run_row_stochastic``    constant row-stochastic P, steps rescaled by diag(P^t)
``run_subgradient_push``  push-sum mixing of the post-descent iterate
``run_push_first``        push-sum mixing with the descent applied after mixing

Each specialized runner can be rewritten as a run of the unified iteration with
particular inputs (:func:`embed`); :func:`verify_embedding` runs both and
compares the trajectories.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .absolute_probability import (
    AbsProbSequence,
    compute_abs_prob,
    pushsum_induced_sequence,
    pushsum_masses,
)
from .diagnostics import DiagnosticsContext, DiagnosticsRow, diagnostics_csv, measure
from .errors import (
    DimensionMismatch,
    EmbeddingUnavailable,
    KindMismatch,
    NonFiniteState,
    NonpositiveMass,
    ZeroDiagonalDivisor,
)
from .graph_conditions import check_A1
from .sequences import MatrixSequence
from .step_schedules import StepSchedule, per_agent_explicit

ZERO_DIAGONAL_TOL = 1e-14
ALGORITHMS = ("unified", "dgd", "dgd_post", "row_stochastic", "subgradient_push", "push_first")


@dataclass(frozen=True)
class AgentStates:
    t: int
    x: np.ndarray


@dataclass(frozen=True)
class PushSumStates:
    t: int
    w: np.ndarray
    y: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return self.w / self.y[:, None]


def iterates(state) -> np.ndarray:
    """The agents' current estimates: ``x`` or the push-sum ratios ``w / y``."""
    return state.z if isinstance(state, PushSumStates) else state.x


@dataclass(frozen=True)
class Snapshot:
    t: int
    state: object
    diagnostics: DiagnosticsRow | None = None


@dataclass
class Trajectory:
    algorithm: str
    snapshots: list
    config_hash: str = ""
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> list[int]:
        return [s.t for s in self.snapshots]

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]

    def at(self, t: int) -> Snapshot:
        for s in self.snapshots:
            if s.t == t:
                return s
        raise KeyError(f"no snapshot at t={t}")

    def diagnostics(self) -> list[DiagnosticsRow]:
        return [s.diagnostics for s in self.snapshots if s.diagnostics is not None]

    def to_csv(self) -> str:
        """Long format ``t,agent,coordinate,value`` of the measured iterates."""
        lines = ["t,agent,coordinate,value"]
        for s in self.snapshots:
            x = iterates(s.state)
            for i in range(x.shape[0]):
                for k in range(x.shape[1]):
                    lines.append(f"{s.t},{i},{k},{float(x[i, k])!r}")
        return "\n".join(lines) + "\n"

    def diagnostics_csv(self, key=None) -> str:
        return diagnostics_csv(self.diagnostics(), key)

    def sidecar(self) -> dict:
        rows = self.diagnostics()
        summary = {}
        if rows:
            last = rows[-1]
            summary = {
                "t": last.t,
                "consensus_error": last.consensus_error,
                "objective_gap": last.objective_gap,
                "dist_to_argmin": last.dist_to_argmin,
                "state_norm": last.state_norm,
            }
        return {"algorithm": self.algorithm, "config_hash": self.config_hash, "seed": self.seed,
                "snapshots": len(self.snapshots), "diagnostics": summary, **self.meta}


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def snapshot_times(steps: int, cadence="geometric") -> set[int]:
    """``geometric`` keeps 0, 1, 2, 4, 8, ...; ``every:k`` keeps multiples of k.

    The final step is always kept.
    """
    if cadence == "geometric":
        times = {0}
        k = 1
        while k <= steps:
            times.add(k)
            k *= 2
    elif cadence == "all":
        times = set(range(steps + 1))
    elif isinstance(cadence, str) and cadence.startswith("every:"):
        k = int(cadence.split(":", 1)[1])
        if k < 1:
            raise ValueError("snapshot interval must be positive")
        times = set(range(0, steps + 1, k))
    else:
        raise ValueError(f"unknown snapshot cadence {cadence!r}")
    times.add(steps)
    return times


def unified_step(x, p, delta, g) -> np.ndarray:
    """One step of ``X(t+1) = P X(t) - diag(delta) G``."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    delta = np.asarray(delta, dtype=float)
    g = np.asarray(g, dtype=float)
    n = x.shape[0]
    if p.shape != (n, n) or delta.shape != (n,) or g.shape != x.shape:
        raise DimensionMismatch(
            f"shapes X{x.shape} P{p.shape} delta{delta.shape} G{g.shape} do not agree")
    out = p @ x - delta[:, None] * g
    _check_finite(out, -1)
    return out


def _check_finite(a, t):
    if not np.all(np.isfinite(a)):
        bad = np.argwhere(~np.isfinite(a))[0]
        raise NonFiniteState(f"non-finite value at index {tuple(bad)} after step {t}")


class _Recorder:
    """Collects snapshots and tracks the running sqrt(t) state bound."""

    def __init__(self, steps, cadence, ctx, x0_block, l_max):
        self.times = snapshot_times(steps, cadence)
        self.ctx = ctx
        self.snapshots = []
        self.x0_norm = float(np.abs(x0_block).sum(axis=1).max())
        self.l_max = l_max
        self.delta_sq = 0.0

    def bound(self, t):
        return self.x0_norm + self.l_max * np.sqrt(self.delta_sq) * np.sqrt(t)

    def record(self, state, delta=None, pi_next=None):
        t = state.t
        if t in self.times:
            row = None
            if self.ctx is not None:
                row = measure(state, self.ctx, delta=delta, pi_next=pi_next,
                              state_bound=self.bound(t))
            self.snapshots.append(Snapshot(t, state, row))

    def add_delta(self, delta):
        self.delta_sq += float(np.max(delta)) ** 2


def _context(problem, abs_prob, diagnostics):
    if not diagnostics:
        return None
    return DiagnosticsContext(problem, abs_prob=abs_prob)


def _default_abs_prob(seq, steps):
    """pi for sequences where it is cheap and exact; ``None`` otherwise."""
    if seq.exact_horizon is None and seq.kind != "doubly":
        return None
    report = check_A1(seq) if seq.kind != "doubly" else None
    if seq.is_doubly():
        n = seq.n
        return AbsProbSequence(steps + 1, np.full((steps + 2, n), 1.0 / n), np.zeros(steps + 1),
                               "uniform_doubly", stationary=seq.exact_horizon is not None)
    if seq.is_constant and report.holds:
        return compute_abs_prob(seq, 1, report)
    return None


def _x0(problem, x0):
    if x0 is None:
        return problem.initial_states().astype(float)
    x0 = np.array(x0, dtype=float)
    if x0.shape != (problem.n, problem.d):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, expected {(problem.n, problem.d)}")
    return x0


def run_unified(problem, seq: MatrixSequence, schedule: StepSchedule, x0=None, steps: int = 0, *,
                abs_prob=None, snapshots="geometric", diagnostics=True,
                algorithm="unified") -> Trajectory:
    """Iterate ``x_i(t+1) = sum_j p_ij(t) x_j(t) - delta_i(t) g_i(t)``, ``g_i(t)`` at ``x_i(t)``."""
    x = _x0(problem, x0)
    if seq.n != problem.n:
        raise DimensionMismatch(f"sequence has n={seq.n} but problem has {problem.n} agents")
    if abs_prob is None and diagnostics:
        abs_prob = _default_abs_prob(seq, steps)
    ctx = _context(problem, abs_prob, diagnostics and abs_prob is not None)
    rec = _Recorder(steps, snapshots, ctx, x, problem.l_max)
    for t in range(steps):
        delta = schedule.delta_at(t)
        rec.record(AgentStates(t, x), delta)
        g = problem.subgradients(x)
        x = seq.at(t) @ x - delta[:, None] * g
        _check_finite(x, t)
        rec.add_delta(delta)
    rec.record(AgentStates(steps, x))
    return Trajectory(algorithm, rec.snapshots)


def run_dgd(problem, seq: MatrixSequence, schedule: StepSchedule, x0=None, steps: int = 0,
            **kwargs) -> Trajectory:
    """Decentralized subgradient descent: doubly-stochastic mixing, one step size for all agents."""
    if not seq.is_doubly():
        raise KindMismatch("dgd needs a doubly-stochastic sequence")
    if schedule.rule != "common_power":
        if schedule.rule != "per_agent_explicit" or np.ptp(schedule.table, axis=1).max() > 0:
            raise KindMismatch("dgd needs an agent-independent step size")
    return run_unified(problem, seq, schedule, x0, steps, algorithm="dgd", **kwargs)


def run_dgd_post(problem, seq: MatrixSequence, schedule: StepSchedule, x0=None, steps: int = 0, *,
                 abs_prob=None, snapshots="geometric", diagnostics=True) -> Trajectory:
    """``x_i(t+1) = sum_j p_ij(t) (x_j(t) - delta_j(t) g_j(t))``."""
    x = _x0(problem, x0)
    if seq.kind == "column":
        raise KindMismatch("dgd_post mixes with a row-stochastic sequence")
    if abs_prob is None and diagnostics:
        abs_prob = _default_abs_prob(seq, steps)
    ctx = _context(problem, abs_prob, diagnostics and abs_prob is not None)
    rec = _Recorder(steps, snapshots, ctx, x, problem.l_max)
    for t in range(steps):
        delta = schedule.delta_at(t)
        rec.record(AgentStates(t, x), delta)
        g = problem.subgradients(x)
        x = seq.at(t) @ (x - delta[:, None] * g)
        _check_finite(x, t)
        rec.add_delta(delta)
    rec.record(AgentStates(steps, x))
    return Trajectory("dgd_post", rec.snapshots)


def _as_constant_matrix(p):
    if isinstance(p, MatrixSequence):
        if not p.is_constant:
            raise KindMismatch("row_stochastic needs a constant matrix")
        if p.kind == "column":
            raise KindMismatch("row_stochastic needs a row-stochastic matrix")
        return p.at(0)
    return MatrixSequence.constant(p, "row").at(0)


def row_stochastic_steps(p, c, alpha, steps, skip_until_positive=False, threshold=1e-6):
    """Per-agent steps ``c (t+1)^alpha / [P^t]_ii`` for ``t < steps``.

    With ``skip_until_positive`` an agent takes no step while its diagonal
    entry is at most ``threshold``; otherwise a diagonal entry at or below
    1e-14 is an error.
    """
    p = _as_constant_matrix(p)
    z = np.eye(p.shape[0])
    out = np.empty((steps, p.shape[0]))
    for t in range(steps):
        zd = np.diag(z)
        base = c * (t + 1.0) ** alpha
        if skip_until_positive:
            active = zd > threshold
            out[t] = np.where(active, base / np.where(active, zd, 1.0), 0.0)
        else:
            if np.any(zd <= ZERO_DIAGONAL_TOL):
                i = int(np.argmin(zd))
                raise ZeroDiagonalDivisor(f"[P^{t}]_{i}{i} = {zd[i]!r}")
            out[t] = base / zd
        z = p @ z
    return out


def run_row_stochastic(problem, p, c: float, alpha: float, x0=None, steps: int = 0, *,
                       skip_until_positive=False, threshold=1e-6, snapshots="geometric",
                       diagnostics=True) -> Trajectory:
    """Row-stochastic mixing with the auxiliary ``Z(t+1) = P Z(t)``, ``Z(0) = I``.

    Agent i divides its step by ``z_ii(t)``, which tends to ``pi_i``.
    """
    pm = _as_constant_matrix(p)
    seq = MatrixSequence.constant(pm, "row")
    x = _x0(problem, x0)
    abs_prob = _default_abs_prob(seq, steps) if diagnostics else None
    ctx = _context(problem, abs_prob, diagnostics and abs_prob is not None)
    rec = _Recorder(steps, snapshots, ctx, x, problem.l_max)
    z = np.eye(pm.shape[0])
    for t in range(steps):
        zd = np.diag(z)
        base = c * (t + 1.0) ** alpha
        if skip_until_positive:
            active = zd > threshold
            delta = np.where(active, base / np.where(active, zd, 1.0), 0.0)
        else:
            if np.any(zd <= ZERO_DIAGONAL_TOL):
                i = int(np.argmin(zd))
                raise ZeroDiagonalDivisor(
                    f"z_{i}{i}({t}) = {zd[i]!r}; P has a zero diagonal pattern at this power "
                    "(use skip_until_positive=True)")
            delta = base / zd
        rec.record(AgentStates(t, x), delta)
        g = problem.subgradients(x)
        x = pm @ x - delta[:, None] * g
        z = pm @ z
        _check_finite(x, t)
        rec.add_delta(delta)
    rec.record(AgentStates(steps, x))
    traj = Trajectory("row_stochastic", rec.snapshots)
    traj.meta["z_diagonal"] = np.diag(z).tolist()
    return traj


def _push_setup(problem, a_seq, w0, y0):
    if a_seq.kind not in ("column", "doubly"):
        raise KindMismatch("push-sum variants need a column-stochastic sequence")
    w = _x0(problem, w0)
    y = np.ones(problem.n) if y0 is None else np.array(y0, dtype=float)
    if np.any(y <= 0):
        raise NonpositiveMass("y0 must be strictly positive")
    return w, y


def _mix_mass(a, y, t):
    y_next = a @ y
    if np.any(y_next <= 0):
        i = int(np.argmin(y_next))
        raise NonpositiveMass(f"y_{i}({t + 1}) = {y_next[i]!r}; A({t}) has a zero row")
    return y_next


def run_subgradient_push(problem, a_seq: MatrixSequence, c: float, alpha: float, w0=None, y0=None,
                         steps: int = 0, *, snapshots="geometric",
                         diagnostics=True) -> Trajectory:
    """Push-sum with descent before mixing.

    Each step: ``z = w / y``, ``x = w - theta(t) g`` with ``g`` at ``z``,
    then ``w <- A(t) x`` and ``y <- A(t) y``; ``theta(t) = c (t+1)^alpha``.
    """
    w, y = _push_setup(problem, a_seq, w0, y0)
    ctx = _context(problem, None, diagnostics)
    mass = y.sum()
    rec = _Recorder(steps, snapshots, ctx, w / y[:, None], problem.l_max)
    for t in range(steps):
        theta = c * (t + 1.0) ** alpha
        # ratio form: mixing weights a_ij y_j / y_i(t+1) applied to z_j - (theta / y_j) g_j
        delta = theta / y
        rec.record(PushSumStates(t, w, y), delta, pi_next=y / mass)
        z = w / y[:, None]
        g = problem.subgradients(z)
        a = a_seq.at(t)
        x = w - theta * g
        w = a @ x
        y = _mix_mass(a, y, t)
        _check_finite(w, t)
        rec.add_delta(delta)
    rec.record(PushSumStates(steps, w, y))
    return Trajectory("subgradient_push", rec.snapshots, meta={"mass": float(y.sum())})


def run_push_first(problem, a_seq: MatrixSequence, c: float, alpha: float, w0=None, y0=None,
                   steps: int = 0, *, snapshots="geometric", diagnostics=True) -> Trajectory:
    """``w(t+1) = A(t) w(t) - theta(t) g(t)`` with ``g`` at the pre-mix ratio ``w(t)/y(t)``."""
    w, y = _push_setup(problem, a_seq, w0, y0)
    ctx = _context(problem, None, diagnostics)
    mass = y.sum()
    rec = _Recorder(steps, snapshots, ctx, w / y[:, None], problem.l_max)
    for t in range(steps):
        theta = c * (t + 1.0) ** alpha
        a = a_seq.at(t)
        y_next = _mix_mass(a, y, t)
        delta = theta / y_next
        rec.record(PushSumStates(t, w, y), delta, pi_next=y_next / mass)
        g = problem.subgradients(w / y[:, None])
        w = a @ w - theta * g
        y = y_next
        _check_finite(w, t)
        rec.add_delta(delta)
    rec.record(PushSumStates(steps, w, y))
    return Trajectory("push_first", rec.snapshots, meta={"mass": float(y.sum())})


# --------------------------------------------------------------------------
# embeddings into the unified iteration


@dataclass
class AlgorithmInputs:
    """Inputs of any runner; each algorithm reads the fields it needs."""

    problem: object
    seq: MatrixSequence | None = None
    a_seq: MatrixSequence | None = None
    schedule: StepSchedule | None = None
    c: float = 1.0
    alpha: float = -0.75
    x0: np.ndarray | None = None
    y0: np.ndarray | None = None
    skip_until_positive: bool = False


@dataclass
class Embedding:
    seq: MatrixSequence
    schedule: StepSchedule
    x0: np.ndarray
    time_map: Callable[[int], int]
    unified_steps: int


def _interleave_identity(rule, n):
    """Sequence with ``I`` at even times and ``rule(t)`` at time ``2t + 1``."""
    eye = np.eye(n)

    def at(s):
        return eye if s % 2 == 0 else rule((s - 1) // 2)

    return MatrixSequence.from_function(at, n, "row", name="interleaved")


def _interleave_zero_steps(table):
    out = np.zeros((2 * table.shape[0], table.shape[1]))
    out[0::2] = table
    return out


def embed(algorithm: str, inputs: AlgorithmInputs, steps: int) -> Embedding:
    """Unified-iteration inputs reproducing ``steps`` steps of ``algorithm``.

    The specialized state at time t equals the unified state at
    ``time_map(t)``.
    """
    prob = inputs.problem
    n = prob.n
    identity = lambda t: t  # noqa: E731
    doubled = lambda t: 2 * t  # noqa: E731
    if algorithm in ("unified", "dgd"):
        return Embedding(inputs.seq, inputs.schedule, _x0(prob, inputs.x0), identity, steps)
    if algorithm == "dgd_post":
        table = np.array([inputs.schedule.delta_at(t) for t in range(steps)]).reshape(steps, n)
        seq = _interleave_identity(inputs.seq.at, n)
        return Embedding(seq, per_agent_explicit(_interleave_zero_steps(table)),
                         _x0(prob, inputs.x0), doubled, 2 * steps)
    if algorithm == "row_stochastic":
        p = _as_constant_matrix(inputs.seq)
        table = row_stochastic_steps(p, inputs.c, inputs.alpha, steps, inputs.skip_until_positive)
        return Embedding(MatrixSequence.constant(p), per_agent_explicit(table.reshape(steps, n)),
                         _x0(prob, inputs.x0), identity, steps)
    if algorithm in ("push_first", "subgradient_push"):
        w0, y0 = _push_setup(prob, inputs.a_seq, inputs.x0, inputs.y0)
        x0 = w0 / y0[:, None]
        ys = pushsum_masses(inputs.a_seq, y0, steps + 1)
        theta = inputs.c * (np.arange(steps) + 1.0) ** inputs.alpha
        if algorithm == "push_first":
            table = theta[:, None] / ys[1:steps + 1]
            seq = pushsum_induced_sequence(inputs.a_seq, y0)
            return Embedding(seq, per_agent_explicit(table.reshape(steps, n)), x0, identity, steps)
        table = theta[:, None] / ys[:steps]
        induced = pushsum_induced_sequence(inputs.a_seq, y0)
        seq = _interleave_identity(induced.at, n)
        return Embedding(seq, per_agent_explicit(_interleave_zero_steps(table.reshape(steps, n))),
                         x0, doubled, 2 * steps)
    raise EmbeddingUnavailable(algorithm)


def run_algorithm(algorithm: str, inputs: AlgorithmInputs, steps: int, **kwargs) -> Trajectory:
    """Dispatch to the specialized runner named ``algorithm``."""
    prob = inputs.problem
    if algorithm == "unified":
        return run_unified(prob, inputs.seq, inputs.schedule, inputs.x0, steps, **kwargs)
    if algorithm == "dgd":
        return run_dgd(prob, inputs.seq, inputs.schedule, inputs.x0, steps, **kwargs)
    if algorithm == "dgd_post":
        return run_dgd_post(prob, inputs.seq, inputs.schedule, inputs.x0, steps, **kwargs)
    if algorithm == "row_stochastic":
        kwargs.pop("abs_prob", None)
        return run_row_stochastic(prob, inputs.seq, inputs.c, inputs.alpha, inputs.x0, steps,
                                  skip_until_positive=inputs.skip_until_positive, **kwargs)
    if algorithm in ("subgradient_push", "push_first"):
        kwargs.pop("abs_prob", None)
        runner = run_subgradient_push if algorithm == "subgradient_push" else run_push_first
        return runner(prob, inputs.a_seq, inputs.c, inputs.alpha, inputs.x0, inputs.y0, steps,
                      **kwargs)
    raise EmbeddingUnavailable(algorithm)


@dataclass(frozen=True)
class EmbeddingReport:
    algorithm: str
    steps: int
    max_deviation: float
    tol: float
    passed: bool
    worst_time: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_embedding(algorithm: str, inputs: AlgorithmInputs, steps: int,
                     tol: float = 1e-10) -> EmbeddingReport:
    """Run ``algorithm`` and its unified embedding and compare them at every mapped time.

    The deviation is entrywise ``|a - b| / max(1, |b|)``.
    """
    special = run_algorithm(algorithm, inputs, steps, snapshots="all", diagnostics=False)
    emb = embed(algorithm, inputs, steps)
    unified = run_unified(inputs.problem, emb.seq, emb.schedule, emb.x0, emb.unified_steps,
                          snapshots="all", diagnostics=False)
    worst, worst_t = 0.0, 0
    for snap in special.snapshots:
        a = iterates(snap.state)
        b = unified.snapshots[emb.time_map(snap.t)].state.x
        dev = float((np.abs(a - b) / np.maximum(1.0, np.abs(b))).max())
        if dev > worst:
            worst, worst_t = dev, snap.t
    return EmbeddingReport(algorithm, steps, worst, tol, worst <= tol, worst_t)


__all__ = [
    "ALGORITHMS", "AgentStates", "PushSumStates", "Snapshot", "Trajectory", "AlgorithmInputs",
    "Embedding", "EmbeddingReport", "unified_step", "run_unified", "run_dgd", "run_dgd_post",
    "run_row_stochastic", "run_subgradient_push", "run_push_first", "run_algorithm", "embed",
    "verify_embedding", "snapshot_times", "config_hash", "iterates", "row_stochastic_steps",
]
