import hashlib
import json
import subprocess
import sys

from redwalk.cli import EXIT_BUDGET, EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, decimal_string, main
from redwalk.numeric_core import QuadraticSurd


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    return code, json.loads(out) if out else None


def test_examples(capsys):
    assert run(capsys, "interro", "2/5") == (EXIT_OK, {"value": "7/128"})
    assert run(capsys, "cdf", "-5/2") == (EXIT_OK, {"value": "7/128", "branch": 1})
    assert run(capsys, "validate", "builtin:pgl2") == (
        EXIT_OK, {"valid": True, "m": [[1, 3, "inf"], [3, 1, 2], ["inf", 2, 1]]})


def test_exact_inputs_and_decimals(capsys):
    code, out = run(capsys, "qmark", "(-1+sqrt(5))/2")
    assert code == EXIT_OK and out["value"] == "2/3"
    code, out = run(capsys, "interro", "1/2", "--decimal-digits", "6")
    assert out == {"value": "1/16", "value_decimal": "0.062500"}
    code, out = run(capsys, "stationarity", "-5/2")
    assert out["equal"] and out["lhs"] == out["rhs"] == "7/128"
    code, out = run(capsys, "fraction-search", "7/128", "--max-den", "100")
    assert code == EXIT_OK and "2/5" in json.dumps(out)
    code, out = run(capsys, "invert", "1/8", "--eps", "1/1000000000", "--decimal-digits", "8")
    assert code == EXIT_OK and out["lo_decimal"] == out["hi_decimal"] == "0.61242994"


def test_decimal_string():
    assert decimal_string(QuadraticSurd.sqrt(2), 5) == "1.41421"
    assert decimal_string(-QuadraticSurd.sqrt(2), 3) == "-1.414"


def test_validation_failure_exit_code(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"lines": [{"vertical": -0.5}, {"semicircle": [0, 1]}, {"vertical": 0}],
                             "basepoint": [0, 1]}))
    code, out = run(capsys, "validate", str(p))
    assert code == EXIT_INVALID and out["valid"] is False and out["pair"] == [2, 2]
    code, out = run(capsys, "interro", "3/2")
    assert code == EXIT_INVALID and out["error"]["type"] == "DomainError"
    code, out = run(capsys, "cdf", "abc")
    assert code == EXIT_INVALID


def test_budget_exit_code(capsys):
    code, out = run(capsys, "simulate", "--walks", "1", "--budget", "3")
    assert code == EXIT_BUDGET and out["status"] == "budget_exhausted"
    code, out = run(capsys, "simulate", "--walks", "200", "--seed", "2")
    assert code == EXIT_OK and out["status_counts"] == {"converged": 200}


def test_internal_exit_code(capsys, monkeypatch):
    from redwalk import interrobang
    from redwalk.errors import InternalInvariantError

    def boom(x):
        raise InternalInvariantError("broken")

    monkeypatch.setattr(interrobang, "interro", boom)
    code, out = run(capsys, "interro", "1/2")
    assert code == EXIT_INTERNAL and out["error"]["type"] == "InternalInvariantError"


def test_manifest_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path, threads in ((a, "1"), (b, "4")):
        code, out = run(capsys, "simulate", "--walks", "700", "--seed", "5", "--threads", threads,
                        "--out", str(path))
        assert code == EXIT_OK
    doc_a, doc_b = json.loads(a.read_text()), json.loads(b.read_text())
    assert doc_a["data"] == doc_b["data"]
    man = doc_a["manifest"]
    payload = json.dumps(doc_a["data"], separators=(",", ":"), ensure_ascii=False)
    assert man["sha256"] == hashlib.sha256(payload.encode()).hexdigest()
    assert man["seed"] == 5 and man["config"] == "pgl2" and "schema_version" in man
    # identical manifests imply identical files
    first = a.read_bytes()
    run(capsys, "simulate", "--walks", "700", "--seed", "5", "--threads", "1", "--out", str(a))
    assert a.read_bytes() == first


def test_plot_data(capsys, tmp_path):
    for kind in ("cdf", "interro", "trajectory"):
        p = tmp_path / f"{kind}.csv"
        code, out = run(capsys, "plot-data", kind, "--out", str(p), "--n", "16")
        assert code == EXIT_OK
        head, body = p.read_bytes().split(b"\n", 1)
        assert head.startswith(b"# manifest ")
        man = json.loads(head[len(b"# manifest "):])
        assert man["sha256"] == hashlib.sha256(body).hexdigest()
    assert (tmp_path / "trajectory.csv").read_text().splitlines()[1] == "step,re,im,lazy,bracket_lo,bracket_hi"


def test_contraction_and_coupling(capsys):
    code, out = run(capsys, "contraction")
    assert code == EXIT_OK and 0 < out["C"] < 1
    code, out = run(capsys, "coupling", "--pairs", "2000", "--mmax", "10")
    assert code == EXIT_OK and out["bound_violations"] == []


def test_ks_command(capsys):
    code, out = run(capsys, "ks", "--walks", "2000")
    assert code == EXIT_OK and out["ks"] < 0.05


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "redwalk.cli", "interro", "1/3"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout) == {"value": "1/64"}
