import json
import subprocess
import sys
from pathlib import Path

import pytest

from cli_cases import COMMANDS, FX, SC
from effectalg import ScenarioError
from effectalg.cli import dumps, fmt_float, run
from effectalg.scenario import Scenario


def _run(argv, fmt="json"):
    return run(["--format", fmt] + [str(a) for a in argv])


@pytest.mark.parametrize("argv,code", COMMANDS,
                         ids=[" ".join(str(a) if not isinstance(a, Path)
                                       else a.name for a in c[0])
                              for c in COMMANDS])
def test_exit_codes_and_determinism(argv, code):
    c1, out1 = _run(argv)
    c2, out2 = _run(argv)
    assert c1 == code == c2
    assert out1 == out2
    json.loads(out1)


def test_subprocess_contract():
    for argv, code in [(["validate", SC / "gbit.json"], 0),
                       (["validate", FX / "invalid_effect.json"], 1),
                       (["validate", FX / "malformed.json"], 2)]:
        p = subprocess.run([sys.executable, "-m", "effectalg", "--format",
                            "json"] + [str(a) for a in argv],
                           capture_output=True, text=True)
        assert p.returncode == code
        out = p.stdout if code != 2 else p.stderr
        assert json.loads(out)["command"] == "validate"


def test_repeatable_witness():
    code, out = _run(["repeatable", SC / "classical.json", "--effect", "a"])
    rep = json.loads(out)
    assert rep["verdict"] == "REPEATABLE"
    assert rep["witness_state"] == [1, 0]
    code, out = _run(["repeatable", SC / "classical.json", "--effect", "half"])
    assert json.loads(out)["verdict"] == "NOT_REPEATABLE"


def test_invalid_effect_is_named():
    code, out = _run(["validate", FX / "invalid_effect.json"])
    rep = json.loads(out)
    bad = [o for o in rep["objects"] if o["status"] != "ok"]
    assert [o["name"] for o in bad] == ["too_big"]


def test_coexist_reports():
    rep = json.loads(_run(["coexist", SC / "gbit.json", "--a", "X",
                           "--b", "Y"])[1])
    assert rep["verdict"] == "INFEASIBLE" and rep["certificate_verified"]
    rep = json.loads(_run(["coexist", SC / "qubit.json", "--a", "Z",
                           "--b", "Xo"])[1])
    assert rep["verdict"] == "UNDECIDED"


def test_witness_out(tmp_path):
    out = tmp_path / "w.json"
    code, _ = _run(["coexist", SC / "classical.json", "--a", "A", "--b", "B",
                    "--witness-out", out])
    assert code == 0
    w = json.loads(out.read_text())
    first = out.read_text()
    _run(["coexist", SC / "classical.json", "--a", "A", "--b", "B",
          "--witness-out", out])
    assert out.read_text() == first
    assert w["outcomes1"] == ["x1", "x2"]


def test_text_format():
    code, out = _run(["coexist", SC / "gbit.json", "--a", "X", "--b", "Y"],
                     fmt="text")
    assert code == 1 and "verdict: INFEASIBLE" in out


def test_bad_tol():
    code, _ = run(["--tol", "2", "validate", str(SC / "gbit.json")])
    assert code == 2


def test_float_formatting():
    assert fmt_float(0.0) == "0" and fmt_float(-0.0) == "0"
    assert fmt_float(1 / 3) == "0.333333333333"
    assert dumps({"b": [1.0, 0.5], "a": 2}) == dumps({"b": [1.0, 0.5], "a": 2})


@pytest.mark.parametrize("data", [
    {"version": "1", "extra": 1},
    {"version": "2"},
    {"version": "1", "models": {"m": {"type": "orthant", "n": 2, "x": 0}}},
    {"version": "1", "checks": [{"command": "coexist", "a": "A"}]},
    {"version": "1", "checks": [{"command": "bogus"}]},
])
def test_scenario_rejects(data):
    with pytest.raises(ScenarioError):
        Scenario(data).validate_all()


def test_scenario_lazy_invariant():
    sc = Scenario.load(FX / "invalid_effect.json")
    res = dict(((s, n), e) for s, n, e in sc.validate_all())
    assert res[("effects", "fine")] is None
    assert "too_big" in res[("effects", "too_big")]
