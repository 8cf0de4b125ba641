import json
import subprocess
import sys

import pytest

from ramif import FDecomposedWitt, Poly, Ring, TLaurent, WittVector, codec
from ramif.cli import main

from helpers import form, mono, space


@pytest.fixture
def files(tmp_path):
    sp = space(5, 2)
    w = form(sp, 1, {("dx1",): mono(sp.ring, -2, prec=8)})
    (tmp_path / "dxz2.json").write_text(codec.dumps(codec.encode(w)))
    sp3 = space(3, 1)
    v = form(sp3, 1, {("dt",): mono(sp3.ring, -3, prec=8)})
    (tmp_path / "dt3.json").write_text(codec.dumps(codec.encode(v)))
    r = Ring(2, ("x1",))
    a = WittVector(2, [TLaurent(r, {-2: Poly.variable(r, "x1")}, 40)])
    (tmp_path / "w22.json").write_text(codec.dumps(codec.encode(FDecomposedWitt({0: a}))))
    (tmp_path / "bad.json").write_text("{\"schema\": ")
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_conductor_omega(files, capsys):
    code, out, _ = run(capsys, "conductor", "omega", "--char", "5", "--input", str(files / "dxz2.json"))
    assert (code, out) == (0, "3\n")


def test_verify_example(files, capsys):
    report = files / "out.json"
    code, out, _ = run(capsys, "verify", "fas", "--char", "3", "--dim", "1", "--max-n", "6", "--trials", "200",
                       "--seed", "7", "--report", str(report))
    assert code == 0 and out.startswith("PASS fas")
    doc = json.loads(report.read_text())
    assert doc["passed"] == doc["attempted"] and doc["seed"] == 7


def test_verify_reports_identical(files, capsys):
    texts = []
    for name in ("a.json", "b.json"):
        run(capsys, "verify", "witt", "--trials", "10", "--seed", "5", "--report", str(files / name))
        texts.append((files / name).read_bytes())
    assert texts[0] == texts[1]


def test_malformed_input(files, capsys):
    code, _, err = run(capsys, "charform", "witt", "--r", "2", "--input", str(files / "bad.json"))
    assert code == 2 and "malformed JSON" in err


def test_input_errors(files, capsys):
    assert run(capsys, "conductor", "omega", "--char", "3", "--input", str(files / "dxz2.json"))[0] == 2
    assert run(capsys, "conductor", "omega", "--input", str(files / "missing.json"))[0] == 2
    assert run(capsys, "charform", "omega", "--input", str(files / "dxz2.json"))[0] == 2
    assert run(capsys, "charform", "omega", "--n", "2", "--input", str(files / "dxz2.json"))[0] == 2
    assert run(capsys, "verify", "fas", "--char", "7")[0] == 2
    assert run(capsys, "verify", "bk", "--degree", "1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_charform_commands(files, capsys):
    code, out, _ = run(capsys, "charform", "witt", "--r", "2", "--input", str(files / "w22.json"))
    assert code == 0
    cf = codec.loads(out)
    assert set(cf.entries) == {"t", "x1"} and cf.entries["t"].frob_dict()
    code, out, _ = run(capsys, "charform", "h1", "--r", "2", "--input", str(files / "w22.json"))
    assert code == 0 and not codec.loads(out).entries["t"].frob
    code, out, _ = run(capsys, "charform", "omega", "--n", "3", "--input", str(files / "dxz2.json"))
    assert code == 0 and codec.loads(out).family == "omega"


def test_oracle_check(files, capsys):
    code, out, _ = run(capsys, "oracle", "check", "--n", "3", "--input", str(files / "dt3.json"))
    doc = json.loads(out)
    assert code == 0 and doc["member"] and doc["closed_form_charform_agrees"]
    code, out, _ = run(capsys, "oracle", "check", "--n", "2", "--input", str(files / "dt3.json"))
    assert code == 0 and not json.loads(out)["member"]
    code, out, _ = run(capsys, "oracle", "check", "--r", "2", "--input", str(files / "w22.json"))
    assert code == 0 and json.loads(out)["member"]


def test_numbers_are_exact(files, capsys):
    _, out, _ = run(capsys, "oracle", "check", "--n", "3", "--input", str(files / "dt3.json"))
    assert "." not in out.replace("ramif/1", "")


def test_console_entry(files):
    res = subprocess.run([sys.executable, "-m", "ramif", "conductor", "witt", "--input", str(files / "w22.json")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "2\n"
