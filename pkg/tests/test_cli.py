import csv
import io
import json
import subprocess
import sys

import pytest

from spdehn.cli import main
from spdehn.spmat import SpMatrix, elementary
from spdehn.words import Word, evaluate

from conftest import R


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_text_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--p", "2", "--root", "+1-2", "--x", "3")
    assert code == 0
    assert SpMatrix.from_text(out) == elementary(R("+1-2", 2), 3)
    code, out, _ = run(capsys, "gen", "--p", "2", "--root", "2*+1", "--format", "json")
    assert json.loads(out) == elementary(R("2*+1", 2), 1).tolist()
    path = tmp_path / "m.txt"
    assert run(capsys, "gen", "--p", "2", "--root", "2*+1", "--out", str(path))[0] == 0
    assert SpMatrix.from_text(path.read_text()) == elementary(R("2*+1", 2), 1)


def test_usage_errors(capsys):
    assert run(capsys, "gen", "--p", "2", "--root", "+1+1-2")[0] == 2
    assert run(capsys, "decompose", "--file", "/nonexistent/m.txt", "--T", "±1")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["gen", "--p", "0", "--root", "+1"])
    assert e.value.code == 2
    capsys.readouterr()


def test_verify_relations_exit_codes(capsys):
    assert run(capsys, "verify-relations", "--p", "2", "--xbound", "1")[0] == 0
    code, out, _ = run(capsys, "verify-relations", "--p", "2", "--xbound", "1", "--rule", "literal")
    assert code == 1
    rep = json.loads(out)
    assert rep["ok"] is False and rep["failures"] > 0


def test_shortcut_sidecar(capsys, tmp_path):
    side = tmp_path / "s.json"
    code, out, _ = run(capsys, "shortcut", "--p", "2", "--root", "+1-2", "--x", "1000000", "--sidecar", str(side))
    assert code == 0
    w = Word.parse(out.strip(), 2)
    assert evaluate(w, 2) == elementary(R("+1-2", 2), 10 ** 6)
    assert json.loads(side.read_text())


def test_decompose_and_omega(capsys, tmp_path):
    M = elementary(R("+1-2", 2), 5) @ elementary(R("2*-2", 2), -3) @ elementary(R("+1+2", 2), 2)
    f = tmp_path / "m.txt"
    f.write_text(M.to_text())
    word, stats = tmp_path / "w.txt", tmp_path / "s.csv"
    code, out, _ = run(capsys, "decompose", "--file", str(f), "--T", "±1,±2", "--word", str(word), "--stats", str(stats))
    assert code == 0
    rep = json.loads(out)
    assert rep["ok"] and rep["word_ok"]
    assert evaluate(Word.parse(word.read_text().strip(), 2), 2) == M
    assert list(csv.DictReader(io.StringIO(stats.read_text())))[0]["elementary_count"] == str(rep["elementary_count"])

    P = elementary(R("+1-2", 3), 10 ** 6) @ elementary(R("+2-3", 3), 2)
    f.write_text(P.to_text())
    code, out, _ = run(capsys, "omega", "--file", str(f), "--S", "+1", "--T", "±2,±3")
    assert code == 0 and json.loads(out)["ok"]
    # not in the parabolic subgroup
    f.write_text(elementary(R("+2-1", 3), 1).to_text())
    assert run(capsys, "omega", "--file", str(f), "--S", "+1", "--T", "±2,±3")[0] == 2


def test_vlattice(capsys, tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("100 0\n0 1/100\n")
    code, out, _ = run(capsys, "vlattice", "--file", str(f), "--r", "1")
    assert code == 0 and json.loads(out)["basis"] == [[0, 1]]


def test_rshort_sweep_deterministic(capsys):
    a = run(capsys, "rshort-sweep", "--p", "2", "--C", "4", "--samples", "3", "--seed", "5")
    b = run(capsys, "rshort-sweep", "--p", "2", "--C", "4", "--samples", "3", "--seed", "5")
    assert a[0] == 0 and a[1] == b[1]
    rows = list(csv.DictReader(io.StringIO(a[1])))
    assert len(rows) == 9 and {r["result"] for r in rows} == {"confirmed"}


def test_triangulate(capsys, tmp_path):
    svg = tmp_path / "t.svg"
    code, out, _ = run(capsys, "triangulate", "--N", "8", "--h", "const", "--svg", str(svg))
    rep = json.loads(out)
    assert code == 0 and rep["triangles"] == 128 and len(rep["faces"]) == 128
    assert svg.read_text().startswith("<svg")
    assert run(capsys, "triangulate", "--N", "6")[0] == 2


def test_dct_check(capsys):
    code, out, _ = run(capsys, "dct-check", "--smin", "3", "--smax", "4", "--tmin", "1", "--tmax", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 and all(r["verdict"] == "True" for r in rows)


def test_area(capsys):
    code, out, _ = run(capsys, "area", "--p", "2", "--word", "e(+1-2) e(+1-2)^-1")
    assert code == 0 and json.loads(out)["area"] == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "spdehn", "gen", "--p", "1", "--root", "2*+1", "--x", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert SpMatrix.from_text(res.stdout) == elementary(R("2*+1", 1), 4)
