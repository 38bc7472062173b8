import json
import subprocess
import sys

import numpy as np
import pytest

from normcomp.cli import main
from normcomp.inequalities import KING_COUNTEREXAMPLE
from normcomp.matio import matrix_to_dict, save_json
from normcomp.rng import SplitMix64, random_pd


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    gen = SplitMix64(5)
    paths = {}
    for name, M in {
        "a": random_pd(3, gen),
        "b": random_pd(3, gen),
        "singular": np.diag([1.0, 0.0, 2.0]),
        "king": np.array(KING_COUNTEREXAMPLE, dtype=float),
    }.items():
        paths[name] = str(tmp_path / f"{name}.json")
        save_json(paths[name], matrix_to_dict(M))
    return paths


def test_verify_random_instance(capsys):
    code, out, _ = run(capsys, "verify", "theorem1", "--random", "--dim", "4", "--partition", "2,2", "--seed", "7", "--q", "1.5")
    assert code == 0 and "satisfied" in out


def test_verify_q_out_of_range(capsys):
    code, _, err = run(capsys, "verify", "theorem1", "--random", "--dim", "4", "--q", "2.5")
    assert code == 1 and "q out of range [1,2] for theorem1" in err


def test_verify_errors_are_distinct(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "nope", "--random", "--dim", "2", "--q", "1.5")
    assert code == 1 and "unknown inequality 'nope'" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err2 = run(capsys, "verify", "general", "--input", str(bad), "--q", "1.5")
    assert code == 1 and "invalid JSON" in err2
    code, _, err3 = run(capsys, "verify", "general", "--q", "1.5")
    assert code == 1 and err3 not in (err, err2)


def test_verify_counterexample_is_a_violation(capsys, files):
    code, out, err = run(capsys, "verify", "king", "--input", files["king"], "--q", "1.5", "--format", "json")
    report = json.loads(out)
    assert code == 2 and not report["satisfied"]
    assert report["lhs"] == pytest.approx(7.7617, abs=5e-4) and report["rhs"] == pytest.approx(7.9761, abs=5e-4)
    assert "not positive semidefinite" in err


def test_verify_json_schema(capsys):
    code, out, _ = run(capsys, "verify", "horn_mathias", "--random", "--dim", "3", "--seed", "2", "--q", "2", "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert {"name", "q", "lhs", "rhs", "slack", "satisfied", "tolerance", "seed"} <= set(report)


def test_seed_environment_override(capsys, monkeypatch):
    monkeypatch.setenv("NORMCOMP_SEED", "11")
    _, out, _ = run(capsys, "verify", "lieb_thirring", "--random", "--dim", "2", "--seed", "3", "--q", "3", "--format", "json")
    assert json.loads(out)["seed"] == 11


def test_solve_riccati_files(capsys, files):
    code, out, _ = run(capsys, "solve", "riccati", "--a", files["a"], "--b", files["b"], "--format", "json")
    result = json.loads(out)
    assert code == 0 and result["residual"] <= 1e-8


def test_solve_phi_random(capsys):
    code, out, _ = run(capsys, "solve", "phi", "--random", "--dim", "3", "--seed", "1", "--p", "-0.5", "--format", "json")
    result = json.loads(out)
    assert code == 0 and result["converged"] and result["certified"]
    assert max(result["ratios"]) <= 0.8536 + 1e-8 and result["seed"] == 1


def test_solve_psi_converges_to_fixed_point(capsys):
    code, out, _ = run(capsys, "solve", "psi", "--random", "--dim", "2", "--seed", "1", "--q", "1.0", "--format", "json")
    result = json.loads(out)
    A = random_pd(2, SplitMix64(1))
    X = np.array(result["solution"]["re"]) + 1j * np.array(result["solution"]["im"])
    assert code == 0 and np.abs(X - A).max() <= 1e-10


def test_solve_singular_input_named(capsys, files):
    code, _, err = run(capsys, "solve", "phi", "--d", files["singular"], "--g0", files["a"], "--p", "0.5")
    assert code == 1 and "--d" in err and "singular" in err
    code, _, err = run(capsys, "solve", "phi", "--random", "--dim", "2", "--p", "1.5")
    assert code == 1


def test_solve_unconverged_exits_2(capsys):
    code, _, _ = run(capsys, "solve", "phi", "--random", "--dim", "3", "--p", "-0.9", "--max-steps", "2")
    assert code == 2


def test_repro_targets(capsys):
    code, out, _ = run(capsys, "repro", "counterexample")
    assert code == 0 and "7.7617" in out and "7.9761" in out
    code, out, _ = run(capsys, "repro", "all", "--format", "json")
    result = json.loads(out)
    assert code == 0 and result["passed"]
    targets = {c["target"] for c in result["checks"]}
    assert targets == {"counterexample", "sharpness", "nonsharpness", "equality-endpoints"}
    assert all({"expected", "computed", "tolerance"} <= set(c) for c in result["checks"])


def test_harness_deterministic_output(capsys, tmp_path):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"inequalities": ["theorem1", "king3"], "trials": 2}))
    outputs = []
    for k in range(2):
        out = tmp_path / f"h{k}.json"
        code, _, _ = run(capsys, "harness", "--config", str(config), "--base-seed", "42", "--out", str(out))
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert "runtime_ms" not in json.loads(outputs[0])


def test_harness_config_diagnostics(capsys, tmp_path):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"inequalities": ["theorem1", "mystery"]}))
    code, _, err = run(capsys, "harness", "--config", str(config))
    assert code == 1 and "mystery" in err
    config.write_text('{"trials": 3,\n "dims": [2,]}')
    code, _, err = run(capsys, "harness", "--config", str(config))
    assert code == 1 and "line 2" in err
    config.write_text('{"trials": "many"}')
    code, _, err = run(capsys, "harness", "--config", str(config))
    assert code == 1 and "trials" in err


def test_usage_errors_exit_1(capsys):
    assert run(capsys, )[0] == 1
    assert run(capsys, "verify", "theorem1")[0] == 1
    assert run(capsys, "solve", "bogus")[0] == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "normcomp", "repro", "counterexample"], capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
