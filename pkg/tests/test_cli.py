import json
import os
import subprocess
import sys
from pathlib import Path

PKG = Path(__file__).parent.parent


def run_cli(*args, env_extra=None, inherit=True):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "h1loc.cli", *args],
        capture_output=True, text=True, env=env, cwd=PKG,
    )


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_analyze_clean_exit(tmp_path):
    spec = write_spec(tmp_path, {
        "p": 5, "n": 2, "label": "demo",
        "generators": [[[7, 0], [0, 1]], [[1, 1], [0, 1]]],
    })
    out = run_cli("analyze", spec)
    assert out.returncode == 0, out.stderr
    doc = json.loads(out.stdout)
    assert doc["order"] == 100
    assert doc["h1"] == [] and doc["h1_loc"] == []
    assert doc["verdicts"]["local_vanishing"]["status"] == "ok"


def test_analyze_trivial_group(tmp_path):
    spec = write_spec(tmp_path, {"p": 2, "n": 1, "generators": []})
    out = run_cli("analyze", spec)
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["order"] == 1 and doc["h1"] == [] and doc["h1_loc"] == []


def test_analyze_rejects_singular_generator(tmp_path):
    spec = write_spec(tmp_path, {"p": 5, "n": 1, "generators": [[[5, 0], [0, 1]]]})
    out = run_cli("analyze", spec)
    assert out.returncode == 1
    assert "determinant" in out.stderr


def test_analyze_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"p": 5,')
    out = run_cli("analyze", str(path))
    assert out.returncode == 1
    assert "line" in out.stderr


def test_constants_cli():
    out = run_cli("constants", "--degree", "1")
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["constant"] == 7 and doc["minimal_set"] == [2, 3, 5, 7]
    out2 = run_cli("constants", "--degree", "2")
    assert json.loads(out2.stdout)["constant"] == 13
    out4 = run_cli("constants", "--degree", "4")
    doc4 = json.loads(out4.stdout)
    assert doc4["constant"] is None and doc4["cyclotomic_bound"] == 9


def test_scan_cli_deterministic(tmp_path):
    a = run_cli("scan", "--p", "2", "--n", "2", "--mode", "exhaustive")
    b = run_cli("scan", "--p", "2", "--n", "2", "--mode", "exhaustive")
    assert a.returncode == 0 and a.stdout == b.stdout
    lines = a.stdout.strip().splitlines()
    header = json.loads(lines[0])
    assert header["type"] == "header" and header["seed"] == 0
    summary = json.loads(a.stderr.strip().splitlines()[-1])
    assert summary["type"] == "summary" and summary["sentinel"] == "pass"


def test_scan_cli_sample_seeded(tmp_path):
    out_a = run_cli("scan", "--p", "3", "--n", "2", "--mode", "sample",
                    "--count", "10", "--seed", "3")
    out_b = run_cli("scan", "--p", "3", "--n", "2", "--mode", "sample",
                    "--count", "10", "--seed", "3")
    assert out_a.stdout == out_b.stdout
    assert len(out_a.stdout.strip().splitlines()) == 11  # header + 10 records


def test_scan_bound_error():
    out = run_cli("scan", "--p", "5", "--n", "2", "--mode", "exhaustive")
    assert out.returncode == 1
    assert "exceeds" in out.stderr


def test_verify_budget_zero_skips():
    out = run_cli("verify", "--budget", "0")
    assert out.returncode == 0, out.stdout + out.stderr
    assert "SKIP" in out.stdout
    assert "FAIL" not in out.stdout


def test_verify_mutation_negative_control():
    """Corrupting the commutator closed form must fail exactly that row."""
    out = run_cli("verify", "--budget", "0",
                  env_extra={"H1LOC_MUTATE": "corrupt-triangular-commutator"})
    assert out.returncode != 0
    lines = [l for l in out.stdout.splitlines() if l.startswith("FAIL")]
    assert any("triangular-commutator-closed-form" in l for l in lines)
    assert len(lines) == 1


def test_falsification_exit_code(tmp_path):
    """With the fixed-point hypothesis suppressed, a known counterexample
    group must trip the falsification abort (exit 2)."""
    spec = write_spec(tmp_path, {
        "p": 2, "n": 2,
        "generators": [[[1, 2], [0, 1]], [[3, 1], [0, 1]]],
    })
    clean = run_cli("analyze", spec)
    assert clean.returncode == 0  # hypotheses honestly violated: no claim
    doc = json.loads(clean.stdout)
    assert doc["h1_loc"] == [2]
    out = run_cli("analyze", spec, env_extra={"H1LOC_MUTATE": "force-applicable"})
    assert out.returncode == 2
    assert "FALSIFICATION" in out.stderr
    bundle_line = [l for l in out.stderr.splitlines() if l.startswith("{")][-1]
    bundle = json.loads(bundle_line)
    assert bundle["type"] == "falsification"
    assert bundle["bundle"]["generators"]


def test_scan_out_file(tmp_path):
    target = tmp_path / "records.jsonl"
    out = run_cli("scan", "--p", "2", "--n", "1", "--mode", "exhaustive",
                  "--out", str(target))
    assert out.returncode == 0
    lines = target.read_text().strip().splitlines()
    assert json.loads(lines[0])["type"] == "header"
    assert len(lines) == 1 + 6  # six subgroups of GL2(F2)
