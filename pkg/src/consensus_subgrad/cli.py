"""Batch experiment driver.

``consensus-subgrad run --config exp.json --out results/`` loads a JSON
experiment, runs the requested assumption checks and one algorithm, and writes
``trajectory.csv``, ``diagnostics.csv``, ``checks.json`` and ``summary.json``.
``compare`` runs several algorithms on the same problem and merges their
diagnostics.

Exit codes: 0 success, 1 runtime or configuration error, 2 failed checks
under ``--strict`` (or a mismatch under ``--verify``).
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import sequences as topo
from .absolute_probability import compute_abs_prob, pushsum_abs_prob, pushsum_induced_sequence
from .engine import ALGORITHMS, AlgorithmInputs, config_hash, run_algorithm, verify_embedding
from .errors import ConfigInvalid, ConsensusError
from .graph_conditions import check_A1, check_A1_prime, check_A1_star
from .problems import L1MedianInstance, L1RegressionInstance
from .sequences import MatrixSequence
from .step_schedules import audit_assumptions, common_power, perturbed_schedule, pi_scaled_power

log = logging.getLogger("consensus_subgrad")

SCHEMA_VERSION = "consensus-subgrad/1"
THREADS_ENV = "CONSENSUS_SUBGRAD_THREADS"
PUSH_ALGORITHMS = ("subgradient_push", "push_first")
TOPOLOGIES = {
    "separation_example": lambda n: topo.separation_example(),
    "lazy_separation_example": lambda n: topo.lazy(topo.separation_example()),
    "skewed_three": lambda n: topo.skewed_three(),
    "uniform": topo.uniform,
    "cyclic_shift": topo.cyclic_shift,
    "ring_metropolis": topo.ring_metropolis,
}

_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_seq_schema = {
    "type": "object",
    "additionalProperties": False,
    "required": ["rule"],
    "properties": {
        "rule": {"enum": ["constant", "periodic", "explicit", "seeded_random"]},
        "kind": {"enum": ["row", "column", "doubly"]},
        "matrix": _matrix,
        "matrices": {"type": "array", "items": _matrix, "minItems": 1},
        "topology": {"enum": sorted(TOPOLOGIES)},
        "n": {"type": "integer", "minimum": 1},
        "transpose": {"type": "boolean"},
        "seed": {"type": "integer"},
        "edge_prob": {"type": "number", "minimum": 0, "maximum": 1},
        "self_loops": {"type": "boolean"},
        "weights": {"enum": ["uniform", "random"]},
        "min_weight": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    },
}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "problem", "steps"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "problem": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["l1_median", "l1_regression"]},
                "anchors": _matrix,
                "anchors_file": {"type": "string"},
                "a": _matrix,
                "data_file": {"type": "string"},
                "b": {"type": "array", "items": {"type": "number"}},
                "n": {"type": "integer", "minimum": 1},
                "d": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "noise": {"type": "number", "minimum": 0},
            },
        },
        "sequence": _seq_schema,
        "column_sequence": _seq_schema,
        "algorithm": {"enum": list(ALGORITHMS)},
        "algorithms": {"type": "array", "items": {"enum": list(ALGORITHMS)}},
        "schedule": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rule": {"enum": ["common_power", "pi_scaled_power", "pi_scaled_perturbed"]},
                "c": {"type": "number", "exclusiveMinimum": 0},
                "alpha": {"type": "number", "maximum": 0},
                "eps0": {"oneOf": [{"type": "number"},
                                   {"type": "array", "items": {"type": "number"}}]},
                "rho": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "steps": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "snapshots": {"type": "string", "pattern": "^(geometric|all|every:[1-9][0-9]*)$"},
        "x0": {"oneOf": [{"enum": ["default", "random"]}, _matrix]},
        "y0": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "skip_until_positive": {"type": "boolean"},
        "checks": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "boolean"}
                           for k in ("a1", "a1prime", "a1star", "a2a3", "embedding")},
        },
        "embedding_steps": {"type": "integer", "minimum": 1},
        "converged_threshold": {"type": "number", "exclusiveMinimum": 0},
        "out": {"type": "string"},
    },
}


# --------------------------------------------------------------------------
# config


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: not valid JSON ({exc})") from exc
    return validate_config(cfg)


def validate_config(cfg: dict) -> dict:
    """Schema plus cross-field checks; the error message names the offending key."""
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigInvalid(f"{where}: {exc.message}") from None
    if "algorithm" not in cfg and "algorithms" not in cfg:
        raise ConfigInvalid("algorithm: required (or an 'algorithms' list for compare)")
    algs = ([cfg["algorithm"]] if "algorithm" in cfg else []) + cfg.get("algorithms", [])
    needs_column = [a for a in algs if a in PUSH_ALGORITHMS]
    needs_row = [a for a in algs if a not in PUSH_ALGORITHMS]
    if needs_column and _column_spec(cfg) is None:
        raise ConfigInvalid(f"column_sequence: required by {needs_column[0]} "
                            "(or give a doubly-stochastic sequence)")
    if needs_row and "sequence" not in cfg:
        raise ConfigInvalid(f"sequence: required by {needs_row[0]}")
    if "sequence" in cfg and cfg["sequence"].get("kind", "row") == "column":
        raise ConfigInvalid("sequence/kind: must be row or doubly")
    if "column_sequence" in cfg and cfg["column_sequence"].get("kind", "column") == "row":
        raise ConfigInvalid("column_sequence/kind: must be column or doubly")
    for key in ("sequence", "column_sequence"):
        spec = cfg.get(key)
        if spec is None:
            continue
        sources = [k for k in ("matrix", "matrices", "topology") if k in spec]
        if spec["rule"] == "seeded_random":
            if sources:
                raise ConfigInvalid(f"{key}/{sources[0]}: not allowed for seeded_random")
            if "n" not in spec:
                raise ConfigInvalid(f"{key}/n: required for seeded_random")
            if "seed" not in spec and "seed" not in cfg:
                raise ConfigInvalid(f"{key}/seed: a seed is required for a randomized spec")
        elif len(sources) != 1:
            raise ConfigInvalid(f"{key}: give exactly one of matrix, matrices, topology")
        elif spec["rule"] == "constant" and "matrices" in spec:
            raise ConfigInvalid(f"{key}/matrices: constant rule takes one matrix")
        elif spec["rule"] != "constant" and "matrix" in spec:
            raise ConfigInvalid(f"{key}/matrix: {spec['rule']} rule takes 'matrices'")
    prob = cfg["problem"]
    given = [k for k in ("anchors", "anchors_file", "a", "data_file") if k in prob]
    if len(given) > 1 and set(given) != {"a"}:
        raise ConfigInvalid(f"problem/{given[1]}: conflicts with problem/{given[0]}")
    wrong = {"l1_median": ("a", "data_file"), "l1_regression": ("anchors", "anchors_file")}
    for k in given:
        if k in wrong[prob["type"]]:
            raise ConfigInvalid(f"problem/{k}: not a field of {prob['type']}")
    explicit = bool(given)
    if not explicit:
        for k in ("n", "d"):
            if k not in prob:
                raise ConfigInvalid(f"problem/{k}: required for a random instance")
        if "seed" not in prob and "seed" not in cfg:
            raise ConfigInvalid("problem/seed: a seed is required for a randomized spec")
    if prob["type"] == "l1_regression" and ("a" in prob) != ("b" in prob):
        raise ConfigInvalid("problem/b: 'a' and 'b' go together")
    if cfg.get("x0") == "random" and "seed" not in cfg:
        raise ConfigInvalid("seed: required for x0 = random")
    sched = cfg.get("schedule", {})
    if sched.get("rule") == "pi_scaled_perturbed" and not {"eps0", "rho"} <= set(sched):
        raise ConfigInvalid("schedule/rho: pi_scaled_perturbed needs eps0 and rho")
    return cfg


def _column_spec(cfg):
    if "column_sequence" in cfg:
        return cfg["column_sequence"]
    seq = cfg.get("sequence")
    if seq is not None and seq.get("kind") == "doubly":
        return seq
    return None


# --------------------------------------------------------------------------
# building objects from a config


def _read_rows(path) -> np.ndarray:
    """CSV of numeric rows, one per agent (``#`` lines are comments)."""
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except (OSError, ValueError) as exc:
        raise ConfigInvalid(f"problem: cannot read {path}: {exc}") from None


def build_problem(cfg):
    p = cfg["problem"]
    seed = p.get("seed", cfg.get("seed"))
    if p["type"] == "l1_median":
        if "anchors" in p:
            return L1MedianInstance(p["anchors"])
        if "anchors_file" in p:
            return L1MedianInstance(_read_rows(p["anchors_file"]))
        return L1MedianInstance.random(p["n"], p["d"], seed=seed, scale=p.get("scale", 1.0))
    if "a" in p:
        return L1RegressionInstance(p["a"], p["b"])
    if "data_file" in p:
        rows = _read_rows(p["data_file"])
        return L1RegressionInstance(rows[:, :-1], rows[:, -1])
    return L1RegressionInstance.random(p["n"], p["d"], seed=seed, noise=p.get("noise", 0.1))


def build_sequence(spec, cfg, default_kind):
    kind = spec.get("kind", default_kind)
    rule = spec["rule"]
    if rule == "seeded_random":
        params = {k: spec[k] for k in ("edge_prob", "self_loops", "weights", "min_weight")
                  if k in spec}
        return MatrixSequence.seeded_random(spec["n"], kind, spec.get("seed", cfg.get("seed")),
                                            **params)
    if "topology" in spec:
        ms = [TOPOLOGIES[spec["topology"]](spec.get("n", cfg["problem"].get("n", 1)))]
    elif "matrix" in spec:
        ms = [np.array(spec["matrix"], dtype=float)]
    else:
        ms = [np.array(m, dtype=float) for m in spec["matrices"]]
    if spec.get("transpose", False):
        ms = [m.T for m in ms]
    if rule == "constant":
        return MatrixSequence.constant(ms[0], kind)
    if rule == "periodic":
        return MatrixSequence.periodic(ms, kind)
    return MatrixSequence.explicit(ms, kind)


def _abs_prob_for(seq, horizon, a1=None):
    a1 = a1 or check_A1(seq)
    if not a1.holds:
        raise ConsensusError(f"A1 fails ({a1.failure_reason}); no absolute probability vectors")
    return compute_abs_prob(seq, horizon, a1)


class Experiment:
    """A validated config turned into library objects."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.steps = cfg["steps"]
        self.problem = build_problem(cfg)
        self.seq = build_sequence(cfg["sequence"], cfg, "row") if "sequence" in cfg else None
        col = _column_spec(cfg)
        self.a_seq = build_sequence(col, cfg, "column") if col is not None else None
        for s in (self.seq, self.a_seq):
            if s is not None and s.n != self.problem.n:
                raise ConfigInvalid(f"sequence: has n={s.n} but the problem has "
                                    f"{self.problem.n} agents")
        sched = cfg.get("schedule", {})
        self.sched_rule = sched.get("rule", "common_power")
        self.c = float(sched.get("c", 1.0))
        self.alpha = float(sched.get("alpha", -0.75))
        self.x0 = self._x0()
        self._abs_prob = None

    def _x0(self):
        x0 = self.cfg.get("x0", "default")
        if x0 == "default":
            return None
        if x0 == "random":
            rng = np.random.default_rng([self.cfg["seed"], 1])
            return rng.uniform(-1.0, 1.0, (self.problem.n, self.problem.d))
        return np.array(x0, dtype=float)

    def abs_prob(self):
        if self._abs_prob is None:
            self._abs_prob = _abs_prob_for(self.seq, self.steps + 1)
        return self._abs_prob

    def schedule(self):
        n = self.problem.n
        if self.sched_rule == "common_power":
            return common_power(self.c, self.alpha, n)
        if self.sched_rule == "pi_scaled_power":
            return pi_scaled_power(self.c, self.alpha, self.abs_prob())
        s = self.cfg["schedule"]
        return perturbed_schedule(self.c, self.alpha, s["eps0"], s["rho"], self.abs_prob())

    def inputs(self, algorithm):
        if algorithm in ("row_stochastic", "dgd", *PUSH_ALGORITHMS) \
                and self.sched_rule != "common_power":
            raise ConfigInvalid(f"schedule/rule: {algorithm} takes a common_power schedule")
        return AlgorithmInputs(
            self.problem, seq=self.seq, a_seq=self.a_seq,
            schedule=self.schedule() if algorithm not in PUSH_ALGORITHMS else None,
            c=self.c, alpha=self.alpha, x0=self.x0,
            y0=self.cfg.get("y0"), skip_until_positive=self.cfg.get("skip_until_positive", False))

    # checks -----------------------------------------------------------------

    def run_checks(self, algorithm) -> dict:
        flags = self.cfg.get("checks", {})
        out = {}
        push = algorithm in PUSH_ALGORITHMS
        mixing = pushsum_induced_sequence(self.a_seq, self._y0()) if push else self.seq
        a1 = None
        if flags.get("a1"):
            a1 = check_A1(mixing)
            out["a1"] = a1.to_dict()
        if flags.get("a1prime"):
            out["a1prime"] = check_A1_prime(mixing).to_dict()
        if flags.get("a1star"):
            if self.a_seq is None:
                raise ConfigInvalid("checks/a1star: needs a column-stochastic sequence")
            out["a1star"] = check_A1_star(self.a_seq).to_dict()
        if flags.get("a2a3"):
            horizon = max(10, min(self.steps, 1000))
            if push:
                sched = common_power(self.c, self.alpha, self.problem.n)
                ap = pushsum_abs_prob(self.a_seq, self._y0(), horizon + 1)
            else:
                sched = (common_power(self.c, self.alpha, self.problem.n)
                         if algorithm == "row_stochastic" else self.schedule())
                ap = self._abs_prob if self._abs_prob is not None and \
                    self._abs_prob.covers(horizon + 1) else _abs_prob_for(self.seq, horizon + 1, a1)
            out["a2a3"] = audit_assumptions(sched, ap, horizon).__dict__.copy()
        if flags.get("embedding"):
            k = self.cfg.get("embedding_steps", max(1, min(self.steps, 1000)))
            out["embedding"] = verify_embedding(algorithm, self.inputs(algorithm), k).to_dict()
        return out

    def _y0(self):
        return self.cfg.get("y0", np.ones(self.problem.n))


def checks_failed(checks: dict) -> list[str]:
    """Names of checks whose verdict is a failure.  A1' is informational: it is
    sufficient for A1 but not necessary."""
    bad = []
    for name in ("a1", "a1star"):
        if name in checks and not checks[name]["holds"]:
            bad.append(name)
    audit = checks.get("a2a3")
    if audit and "analytic_fail" in (audit["a2_verdict"], audit["a3_divergence_verdict"]):
        bad.append("a2a3")
    if "embedding" in checks and not checks["embedding"]["passed"]:
        bad.append("embedding")
    return bad


# --------------------------------------------------------------------------
# running and writing


def effective_config(cfg: dict, seed=None, snapshots=None) -> dict:
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        cfg["seed"] = seed
    if snapshots is not None:
        cfg["snapshots"] = snapshots
    cfg.pop("out", None)
    return cfg


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _sanitize(obj):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
        return repr(float(obj))
    return obj


def execute(cfg: dict, algorithm: str, out: Path, strict: bool) -> int:
    """One algorithm: checks, run, outputs.  Returns the exit code."""
    h = config_hash(cfg)
    exp = Experiment(cfg)
    checks = exp.run_checks(algorithm)
    failed = checks_failed(checks)
    _atomic_write(out / "checks.json", _json(_sanitize({"config_hash": h, "algorithm": algorithm,
                                                         "checks": checks, "failed": failed})))
    for name in failed:
        log.warning("check %s failed", name)
    if checks.get("a1", {}).get("exact") is False:
        log.info("A1 verdict is on probe only (sequence is not finitely describable)")
    if strict and failed:
        return 2
    kwargs = {"snapshots": cfg.get("snapshots", "geometric")}
    if algorithm in ("unified", "dgd", "dgd_post") and exp.sched_rule != "common_power":
        kwargs["abs_prob"] = exp.abs_prob()
    traj = run_algorithm(algorithm, exp.inputs(algorithm), exp.steps, **kwargs)
    traj.config_hash = h
    traj.seed = cfg.get("seed")
    header = f"# config_hash={h}\n"
    _atomic_write(out / "trajectory.csv", header + traj.to_csv())
    _atomic_write(out / "diagnostics.csv", header + traj.diagnostics_csv())
    rows = traj.diagnostics()
    threshold = cfg.get("converged_threshold", 1e-2)
    final = rows[-1] if rows else None
    final_error = None
    if final is not None:
        final_error = final.dist_to_argmin if np.isfinite(final.dist_to_argmin) \
            else final.consensus_error
    summary = {
        "config_hash": h,
        "algorithm": algorithm,
        "seed": cfg.get("seed"),
        "steps": exp.steps,
        "final_error": final_error,
        "final_consensus_error": final.consensus_error if final else None,
        "final_objective_gap": final.objective_gap if final else None,
        "threshold": threshold,
        "converged": bool(final_error is not None and final_error <= threshold),
        "failed_checks": failed,
        "trajectory": traj.sidecar(),
    }
    _atomic_write(out / "summary.json", _json(_sanitize(summary)))
    return 0


def _read_hash(path: Path):
    if not path.exists():
        return None
    text = path.read_text()
    if path.suffix == ".json":
        return json.loads(text).get("config_hash")
    first = text.split("\n", 1)[0]
    return first.split("=", 1)[1] if first.startswith("# config_hash=") else None


def verify_outputs(cfg: dict, algorithm: str, out: Path) -> list[str]:
    """Re-run into a scratch directory; report files whose hash or bytes differ."""
    h = config_hash(cfg)
    problems = []
    for name in ("trajectory.csv", "diagnostics.csv", "checks.json", "summary.json"):
        found = _read_hash(out / name)
        if found != h:
            problems.append(f"{name}: config hash {found} != {h}")
    with tempfile.TemporaryDirectory() as tmp:
        execute(cfg, algorithm, Path(tmp), strict=False)
        fresh = (Path(tmp) / "trajectory.csv").read_bytes()
    old = out / "trajectory.csv"
    if not old.exists() or old.read_bytes() != fresh:
        problems.append("trajectory.csv: bytes differ from a fresh re-run")
    return problems


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigInvalid(f"{THREADS_ENV}: expected an integer, got {raw!r}") from None


def cmd_run(args) -> int:
    raw = load_config(args.config)
    cfg = validate_config(effective_config(raw, args.seed, args.snapshots))
    out = Path(args.out or raw.get("out", "results"))
    if "algorithm" not in cfg:
        raise ConfigInvalid("algorithm: run takes a single algorithm; use compare for a list")
    alg = cfg["algorithm"]
    if args.verify:
        problems = verify_outputs(cfg, alg, out)
        for p in problems:
            print(f"MISMATCH {p}")
        print("verify: ok" if not problems else "verify: FAILED")
        return 2 if problems else 0
    code = execute(cfg, alg, out, args.strict)
    print(f"{alg}: wrote {out} (exit {code})")
    return code


def cmd_compare(args) -> int:
    raw = load_config(args.config)
    cfg = effective_config(raw, args.seed, args.snapshots)
    if args.algorithms is not None:
        algs = [a for a in args.algorithms.split(",") if a]
    else:
        algs = cfg.get("algorithms", [])
    if not algs:
        raise ConfigInvalid("algorithms: the algorithm list is empty")
    unknown = [a for a in algs if a not in ALGORITHMS]
    if unknown:
        raise ConfigInvalid(f"algorithms: unknown algorithm {unknown[0]!r}")
    cfg["algorithms"] = algs
    validate_config(cfg)
    out = Path(args.out or raw.get("out", "results"))
    h = config_hash(cfg)

    def one(alg):
        sub = dict(cfg, algorithm=alg)
        if args.verify:
            return alg, (2 if verify_outputs(sub, alg, out / alg) else 0)
        return alg, execute(sub, alg, out / alg, args.strict)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        codes = dict(pool.map(one, algs))
    if not args.verify:
        merged = [f"# config_hash={h}"]
        for alg in algs:
            path = out / alg / "diagnostics.csv"
            if not path.exists():
                continue
            lines = path.read_text().splitlines()[1:]
            if len(merged) == 1:
                merged.append("algorithm," + lines[0])
            merged.extend(f"{alg},{line}" for line in lines[1:])
        _atomic_write(out / "diagnostics.csv", "\n".join(merged) + "\n")
    for alg in algs:
        print(f"{alg}: exit {codes[alg]}")
    return max(codes.values())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="consensus-subgrad", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("run", "run one algorithm"),
                           ("compare", "run several algorithms on one problem")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="DIR", help="output directory (overrides config 'out')")
        p.add_argument("--strict", action="store_true", help="exit 2 when a check fails")
        p.add_argument("--verify", action="store_true",
                       help="re-run and compare against existing outputs instead of writing")
        p.add_argument("--seed", type=int, metavar="N", help="override the config seed")
        p.add_argument("--snapshots", metavar="{geometric|every:k}")
        if name == "compare":
            p.add_argument("--algorithms", metavar="A,B,...",
                           help="comma-separated ids (default: config 'algorithms')")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return cmd_run(args) if args.command == "run" else cmd_compare(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ConsensusError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
