import json

import numpy as np
import pytest

from consensus_subgrad.cli import CONFIG_SCHEMA, SCHEMA_VERSION, main, validate_config
from consensus_subgrad.errors import ConfigInvalid


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def minimal(**over):
    cfg = {
        "schema": SCHEMA_VERSION,
        "problem": {"type": "l1_median", "anchors": [[0.0], [2.0]]},
        "sequence": {"rule": "constant", "topology": "uniform", "n": 2},
        "algorithm": "unified",
        "steps": 100,
    }
    cfg.update(over)
    return cfg


def read_hash_line(path):
    return path.read_text().split("\n", 1)[0]


def test_minimal_run(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", write(tmp_path, minimal()), "--out", str(out)]) == 0
    for name in ("trajectory.csv", "diagnostics.csv", "checks.json", "summary.json"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    h = summary["config_hash"]
    assert read_hash_line(out / "trajectory.csv") == f"# config_hash={h}"
    assert read_hash_line(out / "diagnostics.csv") == f"# config_hash={h}"
    assert json.loads((out / "checks.json").read_text())["config_hash"] == h
    assert summary["converged"] is True


def test_separation_example(tmp_path):
    cfg = minimal(problem={"type": "l1_median", "anchors": [[0.0], [1.0], [2.0], [3.0]]},
                  sequence={"rule": "constant", "topology": "separation_example"}, steps=0,
                  checks={"a1": True, "a1prime": True})
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out), "--strict"]) == 0
    checks = json.loads((out / "checks.json").read_text())["checks"]
    assert checks["a1"]["holds"] and checks["a1"]["witness_T"] == 6
    assert not checks["a1prime"]["holds"]
    assert "zero diagonal" in checks["a1prime"]["failure_reason"]


def test_compare_merged(tmp_path):
    cfg = minimal(problem={"type": "l1_median", "n": 4, "d": 2}, seed=3, steps=3000,
                  sequence={"rule": "constant", "topology": "ring_metropolis", "n": 4,
                            "kind": "doubly"})
    out = tmp_path / "cmp"
    code = main(["compare", "--config", write(tmp_path, cfg), "--out", str(out),
                 "--algorithms", "dgd_post,push_first"])
    assert code == 0
    lines = (out / "diagnostics.csv").read_text().strip().split("\n")
    assert lines[1].startswith("algorithm,t,")
    assert {ln.split(",")[0] for ln in lines[2:]} == {"dgd_post", "push_first"}
    for alg in ("dgd_post", "push_first"):
        assert json.loads((out / alg / "summary.json").read_text())["converged"]


def test_compare_empty_list(tmp_path, capsys):
    assert main(["compare", "--config", write(tmp_path, minimal()), "--algorithms", ""]) == 1
    assert "algorithms" in capsys.readouterr().err


def test_compare_strict_non_primitive(tmp_path):
    cfg = minimal(problem={"type": "l1_median", "anchors": [[0.0], [1.0], [2.0]]},
                  sequence={"rule": "constant", "topology": "cyclic_shift", "n": 3},
                  checks={"a1": True}, steps=10)
    code = main(["compare", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "x"),
                 "--algorithms", "row_stochastic", "--strict"])
    assert code == 2


def test_unknown_key_named(tmp_path, capsys):
    cfg = minimal(stepz=3)
    assert main(["run", "--config", write(tmp_path, cfg)]) == 1
    assert "stepz" in capsys.readouterr().err
    with pytest.raises(ConfigInvalid, match="sequence"):
        validate_config(minimal(sequence={"rule": "constant", "topology": "uniform", "wat": 1}))


@pytest.mark.parametrize("bad, key", [
    ({"steps": -1}, "steps"),
    ({"schema": "consensus-subgrad/0"}, "schema"),
    ({"algorithm": "push_first"}, "column_sequence"),
    ({"problem": {"type": "l1_median", "n": 3, "d": 1}}, "seed"),
    ({"sequence": {"rule": "seeded_random", "n": 2}}, "seed"),
    ({"sequence": {"rule": "constant"}}, "sequence"),
    ({"schedule": {"rule": "pi_scaled_perturbed"}}, "schedule"),
])
def test_config_errors(bad, key):
    with pytest.raises(ConfigInvalid, match=key):
        validate_config(minimal(**bad))


def test_schema_is_fail_closed():
    assert CONFIG_SCHEMA["additionalProperties"] is False


def test_determinism_and_verify(tmp_path):
    cfg = minimal(problem={"type": "l1_median", "n": 5, "d": 2}, seed=7, steps=500,
                  sequence={"rule": "seeded_random", "n": 5, "kind": "doubly"},
                  algorithm="dgd")
    path = write(tmp_path, cfg)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", path, "--out", str(a)]) == 0
    assert main(["run", "--config", path, "--out", str(b)]) == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    assert main(["run", "--config", path, "--out", str(a), "--verify"]) == 0
    # a different seed changes the hash, which --verify detects
    assert main(["run", "--config", path, "--out", str(a), "--verify", "--seed", "8"]) == 2


def test_seed_override_changes_output(tmp_path):
    cfg = minimal(problem={"type": "l1_median", "n": 3, "d": 1}, seed=1, steps=5,
                  sequence={"rule": "constant", "topology": "uniform", "n": 3})
    path = write(tmp_path, cfg)
    main(["run", "--config", path, "--out", str(tmp_path / "s1")])
    main(["run", "--config", path, "--out", str(tmp_path / "s2"), "--seed", "2"])
    t1 = (tmp_path / "s1" / "trajectory.csv").read_text()
    t2 = (tmp_path / "s2" / "trajectory.csv").read_text()
    assert t1 != t2


def test_snapshots_flag(tmp_path):
    out = tmp_path / "o"
    main(["run", "--config", write(tmp_path, minimal(steps=10)), "--out", str(out),
          "--snapshots", "every:5"])
    lines = (out / "trajectory.csv").read_text().strip().split("\n")[2:]
    assert sorted({int(ln.split(",")[0]) for ln in lines}) == [0, 5, 10]


def test_checks_and_embedding(tmp_path):
    cfg = minimal(problem={"type": "l1_median", "n": 4, "d": 2}, seed=0, steps=200,
                  sequence={"rule": "constant", "topology": "separation_example"},
                  column_sequence={"rule": "constant", "topology": "separation_example",
                                   "transpose": True},
                  algorithm="push_first",
                  checks={"a1": True, "a1star": True, "a2a3": True, "embedding": True})
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out), "--strict"]) == 0
    checks = json.loads((out / "checks.json").read_text())["checks"]
    assert checks["a1star"]["holds"] and checks["embedding"]["passed"]
    assert checks["a2a3"]["a2_verdict"] == "analytic_pass"


def test_strict_a2_failure(tmp_path):
    cfg = minimal(schedule={"rule": "common_power", "c": 1.0, "alpha": -0.3},
                  checks={"a2a3": True}, steps=20)
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o"),
                 "--strict"]) == 2
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "p")]) == 0


def test_pi_scaled_unified(tmp_path):
    cfg = minimal(problem={"type": "l1_median", "anchors": [[0.0], [1.0], [2.0]]},
                  sequence={"rule": "constant", "topology": "skewed_three"},
                  schedule={"rule": "pi_scaled_power", "c": 1.0, "alpha": -0.75}, steps=20000)
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    assert json.loads((out / "summary.json").read_text())["converged"]


def test_runtime_error_exit(tmp_path, capsys):
    cfg = minimal(problem={"type": "l1_median", "anchors": [[0.0], [1.0], [2.0], [3.0]]},
                  sequence={"rule": "constant", "topology": "separation_example"},
                  algorithm="row_stochastic", steps=5)
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 1
    assert "ZeroDiagonalDivisor" in capsys.readouterr().err


def test_problem_from_csv(tmp_path):
    data = tmp_path / "anchors.csv"
    np.savetxt(data, np.array([[0.0, 1.0], [1.0, 1.0], [4.0, -1.0]]), delimiter=",")
    cfg = minimal(problem={"type": "l1_median", "anchors_file": str(data)},
                  sequence={"rule": "constant", "topology": "uniform", "n": 3}, steps=2000)
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    assert json.loads((out / "summary.json").read_text())["converged"]


def test_regression_problem(tmp_path):
    cfg = minimal(problem={"type": "l1_regression", "n": 5, "d": 2}, seed=4,
                  sequence={"rule": "constant", "topology": "uniform", "n": 5},
                  steps=2000, checks={"a1": True})
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    assert np.isfinite(json.loads((out / "summary.json").read_text())["final_error"])


def test_algorithms_list_only(tmp_path, capsys):
    cfg = minimal(problem={"type": "l1_median", "n": 4, "d": 1}, seed=2, steps=200,
                  sequence={"rule": "constant", "topology": "ring_metropolis", "n": 4,
                            "kind": "doubly"}, algorithms=["dgd", "push_first"])
    del cfg["algorithm"]
    path = write(tmp_path, cfg)
    assert main(["compare", "--config", path, "--out", str(tmp_path / "c")]) == 0
    assert main(["run", "--config", path, "--out", str(tmp_path / "r")]) == 1
    assert "algorithm" in capsys.readouterr().err
    del cfg["algorithms"]
    with pytest.raises(ConfigInvalid, match="algorithm"):
        validate_config(cfg)
