import csv
import io
import json
import subprocess
import sys

import pytest

from prhl.cases import random_walk as RW
from prhl.cases.common import DATA, params_json
from prhl.cli import FAIL, OK, OPEN, USAGE, main
from prhl.logic.proof import script_to_json

WALK = DATA / "random-walk"
COINS = DATA / "biased-coins"
BINS = DATA / "balls-bins"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def walk_args(proof=WALK / "proof.json"):
    return [WALK / "program.pwhile", WALK / "program.pwhile", "--proof", proof,
            "--domains", WALK / "domains.json"]


def test_interpret_json(capsys):
    code, out, _ = run(capsys, "interpret", WALK / "program.pwhile", "--memory",
                       '{"start": 0, "k": 2}', "--format", "json")
    assert code == OK
    js = json.loads(out)
    assert js["schema"] == "prhl-dist/1" and js["mass"] == "1"
    assert js["entries"] == [[-2, "1/4"], [0, "1/2"], [2, "1/4"]]


def test_interpret_csv_and_memory_file(capsys, tmp_path):
    mem = tmp_path / "m.json"
    mem.write_text('{"k": 1, "q1": "7/10"}')
    code, out, _ = run(capsys, "interpret", COINS / "c1.pwhile", "--memory", f"@{mem}",
                       "--format", "csv")
    assert code == OK
    rows = list(csv.reader(io.StringIO(out.split("\n", 1)[1])))
    assert rows == [["value", "probability"], ["0", "3/10"], ["1", "7/10"]]


def test_interpret_fuel(capsys, tmp_path):
    prog = tmp_path / "spin.pwhile"
    prog.write_text("var x : int;\nwhile true do skip end\nreturn x")
    code, _, err = run(capsys, "interpret", prog, "--memory", '{"x": 0}', "--fuel", "3")
    assert code == OPEN and json.loads(err)["error"] == "fuel"
    code, out, _ = run(capsys, "interpret", prog, "--memory", '{"x": 0}', "--fuel", "3", "--drop")
    assert code == OK and "mass" in out


def test_check_accepts_walk(capsys):
    code, out, _ = run(capsys, "check", *walk_args(), "--format", "json")
    assert code == OK and json.loads(out)["status"] == "accepted"


def test_check_rejects_swapped_bijections(capsys, tmp_path):
    p = RW.Params()
    a = RW.assertions(p)
    lib = {"case": RW.NAME, "params": params_json(p)}
    bad = tmp_path / "swapped.json"
    bad.write_text(json.dumps(script_to_json(a["pre"], a["post"], RW.proof(p, True), lib)))
    code, out, err = run(capsys, "check", *walk_args(bad), "--format", "json")
    assert code == FAIL
    assert json.loads(out)["status"] == "rejected"
    diag = json.loads(err)
    assert diag["error"] == "proof rejected" and diag["counterexample"]["m1"]


def test_validate_with_overrides(capsys):
    code, _, _ = run(capsys, "validate", WALK / "program.pwhile", WALK / "program.pwhile",
                     "--domains", WALK / "domains.json", "--lib", "random-walk",
                     "--pre", "start#1 + 2 = start#2 && k#1 = k#2", "--post", "P(H#1) ==> pos#1 = pos#2")
    assert code == OK
    code, _, err = run(capsys, "validate", WALK / "program.pwhile", WALK / "program.pwhile",
                       "--domains", WALK / "domains.json", "--lib", "random-walk",
                       "--pre", "start#1 + 2 = start#2 && k#1 = k#2", "--post", "pos#1 = pos#2")
    assert code == FAIL and json.loads(err)["error"] == "judgment invalid"


def test_tv_report_csv(capsys):
    code, out, _ = run(capsys, "tv-report", *walk_args(), "--format", "csv")
    assert code == OK
    rows = list(csv.reader(io.StringIO(out.split("\n", 1)[1])))
    assert rows[1][3:] == ["1/2", "1/2", "ok"]


def test_sd_report(capsys):
    code, out, _ = run(capsys, "sd-report", COINS / "c1.pwhile", COINS / "c2.pwhile",
                       "--proof", COINS / "proof.json", "--domains", COINS / "domains.json",
                       "--format", "json")
    assert code == OK
    (rep,) = json.loads(out)["reports"]
    assert rep["verdict"] == "ok"


@pytest.mark.parametrize("name", ["random-walk", "torus", "biased-coins", "balls-bins", "birth-death"])
def test_case_study_defaults(capsys, name):
    code, out, _ = run(capsys, "case-study", name, "--format", "json")
    assert code == OK and json.loads(out)["ok"] is True


def test_case_study_with_params(capsys):
    code, out, _ = run(capsys, "case-study", "random-walk", "--param", "k=3", "--param", "n=1",
                       "--format", "csv")
    assert code == OK and out.strip().endswith(",ok")


@pytest.mark.parametrize("argv", [
    ["case-study", "random-walk", "--param", "k=99"],
    ["case-study", "random-walk", "--param", "k"],
    ["case-study", "nowhere"],
    ["interpret", "missing.pwhile"],
    ["check", str(WALK / "program.pwhile"), str(WALK / "program.pwhile"), "--domains",
     str(WALK / "domains.json")],
    ["interpret", str(WALK / "program.pwhile"), "--memory", "{nope"],
    ["interpret", str(WALK / "program.pwhile"), "--memory", '{"zz": 1}'],
    ["interpret", str(WALK / "program.pwhile"), "--fuel", "0"],
    [],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == USAGE


def test_parse_error_reports_position(capsys, tmp_path):
    prog = tmp_path / "bad.pwhile"
    prog.write_text("var x : int;\nx := := 1")
    code, _, err = run(capsys, "interpret", prog)
    diag = json.loads(err)
    assert code == USAGE and diag["error"] == "parse" and diag["line"] == 2


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "prhl.cli", "case-study", "balls-bins",
                        "--format", "human"], capture_output=True, text=True)
    assert r.returncode == 0 and "binA" in r.stdout
