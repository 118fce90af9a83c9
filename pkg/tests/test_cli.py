import json
from pathlib import Path

import pytest

from garsia.cli import run

MEASURES = Path(__file__).resolve().parents[1] / "measures"


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def measure(name):
    return str(MEASURES / f"{name}.json")


def test_info(capsys):
    code, out, err = call(capsys, "info", "--poly", "3,4,3,5", "--levels", "2", "--assume-irreducible")
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert doc["tool"] == "garsia" and len(doc["input_sha256"]) == 64
    assert doc["M"] == 5 and doc["conjugates"]["classification"] == "AllOutsideUnitCircle"
    assert doc["groups"][1]["order"] == 25 and doc["groups"][1]["phi"]["t"] == 15


def test_irreducibility_warning(capsys):
    code, out, err = call(capsys, "info", "--poly", "2,-3", "--levels", "1")
    assert code == 0 and "irreducibility" in err


def test_entropy_csv(capsys):
    code, out, _ = call(capsys, "entropy", "--poly", "2,-3", "--measure", measure("uniform3"), "--levels", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# tool=garsia version=")
    assert lines[1].startswith("n,lower_nats,upper_nats,gap,atoms_X,atoms_Y,lower_valid")
    assert len(lines) == 6
    assert abs(float(lines[5].split(",")[1]) - 1.0986122886681098) < 1e-12


def test_entropy_budget_exit(capsys):
    code, out, err = call(capsys, "entropy", "--poly", "3,4,3,5", "--measure", measure("uniform5"),
                          "--levels", "6", "--budget", "1000")
    assert code == 3 and "budget" in err


def test_vanishing_search(capsys):
    code, out, _ = call(capsys, "vanishing", "--poly", "1,-2", "--measure", measure("bernoulli"))
    doc = json.loads(out)
    assert code == 0 and doc["level"] == 1 and doc["report"]["verdict"]


def test_vanishing_golden_strict(capsys):
    code, out, err = call(capsys, "vanishing", "--poly", "3,4,3,5", "--measure", measure("golden"))
    assert code == 0 and json.loads(out)["level"] == 2
    code, _, err = call(capsys, "vanishing", "--poly", "3,4,3,5", "--measure", measure("golden"), "--strict")
    assert code == 4 and "heuristic" in err


def test_vanishing_single_level(capsys):
    code, out, _ = call(capsys, "vanishing", "--poly", "3,4,3,5", "--measure", measure("uniform4"), "--level", "2")
    doc = json.loads(out)
    assert code == 0 and doc["report"]["verdict"] is False and doc["report"]["unkilled"]


def test_charequi(capsys):
    code, out, _ = call(capsys, "charequi", "--poly", "3,4,3,5", "--measure", measure("uniform5"), "--levels", "2")
    doc = json.loads(out)
    assert code == 0 and doc["agree"] and len(doc["levels"]) == 2


def test_classify_interval(capsys):
    code, out, _ = call(capsys, "classify", "--poly", "3,4,3,5", "--interval", "12")
    doc = json.loads(out)
    assert code == 0
    assert [f["label"] for f in doc["families"]] == ["E_1", "E_2^(1)", "E_2^(2)"]
    assert doc["families"][2]["angles"][:2] == ["2/5", "3/5"]


def test_classify_measure(capsys):
    code, out, _ = call(capsys, "classify", "--poly", "3,4,3,5", "--measure", measure("uniform5"))
    doc = json.loads(out)
    assert code == 0 and doc["found"] and doc["family"]["label"] == "E_1" and doc["certificate"]


def test_classify_needs_one_source(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["classify", "--poly", "3,4,3,5"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_fourier(capsys, tmp_path):
    csv_path = tmp_path / "scan.csv"
    code, out, _ = call(capsys, "fourier", "--lambda", "1/2", "--measure", measure("bernoulli"),
                        "--v-max", "4096", "--points", "200", "--csv", str(csv_path))
    doc = json.loads(out)
    assert code == 0 and 0.9 <= doc["delta"] <= 1.1
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("# tool=garsia") and lines[1] == "v,magnitude,truncation_bound"
    assert len(lines) == 202


def test_fourier_lambda_and_poly_exclusive(capsys):
    with pytest.raises(SystemExit):
        run(["fourier", "--lambda", "1/2", "--poly", "1,-2", "--measure", measure("bernoulli")])
    capsys.readouterr()


def test_spectrum(capsys):
    code, out, _ = call(capsys, "spectrum", "--poly", "3,4,3,5", "--measure", measure("uniform5"), "--level", "3")
    doc = json.loads(out)
    assert code == 0 and doc["vanishing_level"] == 1 and len(doc["support"]) == 1


@pytest.mark.parametrize("argv", [
    ["info", "--poly", "2,4"],
    ["info", "--poly", "1,0"],
    ["entropy", "--poly", "2,-3"],
    ["vanishing", "--poly", "2,-3", "--measure", "/nonexistent/measure.json"],
    ["vanishing", "--poly", "1,-1,-1", "--measure", str(MEASURES / "bernoulli.json")],
    ["classify", "--poly", "1,0,6", "--interval", "5"],
])
def test_invalid_input_exit_code(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and "error" in err


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, out, _ = call(capsys, "classify", "--poly", "3,4,3,5", "--measure", measure("golden"), "-o", str(path))
        assert code == 0 and out == ""
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["family"]["label"] == "E_2^(2)" and doc["heuristic"]
