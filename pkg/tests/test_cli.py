import io
import json

import pytest

from sclaguerre.cli import run
from sclaguerre.numerics import PrecisionContext
from sclaguerre.opcore import recurrence_table
from sclaguerre.output import emit, parse_csv, parse_json


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_verify_discrete_example():
    code, out, _ = call("verify --lambda 1.5 --t 0.8 --nmax 40 --digits 150 --identity discrete-system --format csv".split())
    assert code == 0
    config, comments, rows = parse_csv(out)
    assert list(rows[0]) == ["n", "residual_a", "residual_b", "pass"]
    assert [int(r["n"]) for r in rows] == list(range(41))
    assert all(r["pass"] == "true" for r in rows)
    assert config["digits"] == 150 and config["identity"] == "discrete-system"


def test_recurrence_json_example():
    code, out, _ = call("recurrence --lambda 1 --t 0 --nmax 1 --digits 50 --format json".split())
    assert code == 0
    doc = parse_json(out)
    mp = PrecisionContext(50).mp
    a0 = mp.mpf(doc["rows"][0]["alpha"])
    assert abs(a0 - mp.sqrt(mp.pi) / 2) < mp.mpf(10) ** -45
    assert doc["rows"][0]["alpha"].startswith("0.8862269254")
    assert set(doc) >= {"config", "rows", "summary"}


def test_moments_example():
    code, out, _ = call("moments --lambda 1 --t 0 --jmax 0".split())
    assert code == 0
    _, _, rows = parse_csv(out)
    assert rows == [{"j": "0", "mu": "0.5"}]


def test_usage_errors_exit_2():
    assert call(["verify", "--bogus"])[0] == 2
    assert call([])[0] == 2
    assert call("moments --jmax 1 --digits 5".split())[0] == 2
    assert call("moments --jmax 1 --lambda -3".split())[0] == 2
    assert call("verify --lambda 1.5".split())[0] == 2
    assert call("moments --jmax 0 --output /nonexistent/dir/x.csv".split())[0] == 2


def test_failing_check_exit_1():
    code, out, err = call("verify --lambda 1.5 --t 0.8 --nmax 6 --identity p-difference --tol 1e-300".split())
    assert code == 1
    assert "false" in out and "checks failed" in err and "p-difference" in err


def test_verify_all_small():
    code, out, _ = call("verify --lambda 1.5 --t 0.8 --n-list 2 --digits 40 --fd-step 1e-10 --identity all".split())
    assert code == 0
    _, _, rows = parse_csv(out)
    assert {r["identity"] for r in rows} == {
        "discrete-system", "sigma-discrete", "p-difference", "compatibility", "ode", "ladder", "riccati",
        "painleve4", "chazy", "sigma-continuous", "toda"}


def test_fluid_and_asymptotics_subcommands(tmp_path):
    path = tmp_path / "fluid.json"
    code, out, _ = call(f"fluid --lambda 1.5 --t 0.8 --n 50 --digits 40 --samples 3 --format json --output {path}".split())
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert len(doc["rows"]) == 3 and doc["summary"]["pass"] is True
    code, out, _ = call("asymptotics --lambda 1.5 --t 0.8 --quantity beta --n-list 100,200,400 --through=-5/2 --digits 40".split())
    assert code == 0
    assert "# fit_pass: true" in out


def test_output_is_deterministic():
    argv = "verify --lambda 1.5 --t 0.8 --nmax 5 --identity ode --seed 7 --digits 60".split()
    assert call(argv) == call(argv)
    assert call(argv)[1] != call(argv[:-4] + ["--seed", "8", "--digits", "60"])[1]


def test_digits_from_environment(monkeypatch):
    monkeypatch.setenv("SCLAGUERRE_DIGITS", "70")
    code, out, _ = call("moments --jmax 1".split())
    config, _, rows = parse_csv(out)
    assert config["digits"] == 70 and len(rows[1]["mu"].replace("0.", "", 1)) >= 69
    code, out, _ = call("moments --jmax 1 --digits 40".split())
    assert parse_csv(out)[0]["digits"] == 40
    monkeypatch.setenv("SCLAGUERRE_DIGITS", "many")
    assert call("moments --jmax 1".split())[0] == 2


def test_emit_empty_rows():
    text = emit([], ["n", "value"], {"command": "x"}, version="0")
    config, comments, rows = parse_csv(text)
    assert rows == [] and config == {"command": "x"}
    assert text.splitlines()[-1] == "n,value"


def test_emit_json_round_trip():
    rows = [{"n": "1", "residual": "1.5e-60", "pass": True}]
    doc = {"config": {"a": 1}, "rows": rows, "summary": {"pass": True}, "version": "0"}
    text = emit(rows, ["n", "residual", "pass"], {"a": 1}, {"pass": True}, "json", version="0")
    assert parse_json(text) == doc


def test_emit_preserves_150_digits(unit):
    ctx = PrecisionContext(150)
    a0 = recurrence_table(1, unit, ctx).alpha[0]
    for fmt in ("csv", "json"):
        text = emit([{"alpha": a0}], ["alpha"], {}, fmt=fmt)
        s = parse_csv(text)[2][0]["alpha"] if fmt == "csv" else parse_json(text)["rows"][0]["alpha"]
        assert ctx.mpf(s) == a0
