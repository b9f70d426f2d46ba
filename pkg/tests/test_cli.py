import io
import json
import subprocess
import sys

import pytest

from corpus import FIXTURES, axp
from kplus.cli import EXIT_FUEL, EXIT_INVALID, EXIT_OK, EXIT_PARSE, EXIT_USAGE, run_cli
from kplus.formula import BoxPlus, Imp, Var
from kplus.hilbert import AxiomIV, Assume, Nec, check_derivation, dump_derivation, load_derivation
from kplus.proof import check_proof, dump_proof, load_proof
from kplus.sequent import Sequent

EX1 = str(FIXTURES / "ex1.proof")
EXBAD = str(FIXTURES / "exbad.proof")
p = Var("p")


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys):
    assert run(capsys, "check", EX1) == (EXIT_OK, "Valid (annotation: p)\n", "")
    code, out, _ = run(capsys, "check", EXBAD)
    assert code == EXIT_INVALID and out == "Invalid: NoBoxPlusRightOnPath at node 2\n"


def test_check_with_explicit_annotation(capsys):
    assert run(capsys, "check", EX1, "--ann", "circle")[:2] == (EXIT_OK, "Valid (annotation: circle)\n")
    code, out, _ = run(capsys, "check", EX1, "--ann", "q")
    assert code == EXIT_INVALID and out.startswith("Invalid: AnnotationError")


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", EXBAD, "--format", "json")
    data = json.loads(out)
    assert code == EXIT_INVALID
    assert data["result"] == "invalid" and data["reason"] == "NoBoxPlusRightOnPath" and data["node"] == 2


def test_check_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO((FIXTURES / "ex1.proof").read_text()))
    assert run(capsys, "check", "-")[0] == EXIT_OK


def test_annotate(capsys):
    code, out, _ = run(capsys, "annotate", EX1)
    assert code == EXIT_OK
    assert out.splitlines() == ["0: p", "1: circle", "2: p", "3: p", "4: p"]
    code, out, _ = run(capsys, "annotate", EX1, "--format", "json")
    assert json.loads(out)["1"] == "circle"


def test_cutelim_writes_a_checkable_proof(capsys, tmp_path):
    target = tmp_path / "out.proof"
    assert run(capsys, "cutelim", EX1, "-o", str(target))[0] == EXIT_OK
    proof = load_proof(target.read_text())
    assert check_proof(proof) and proof.is_cut_free() and proof.is_slim()
    assert run(capsys, "check", str(target))[0] == EXIT_OK


def test_regularize_to_stdout(capsys):
    code, out, _ = run(capsys, "regularize", EX1)
    assert code == EXIT_OK
    assert check_proof(load_proof(out))


def test_fuel_exhaustion(capsys):
    code, _, err = run(capsys, "cutelim", EX1, "--fuel", "5")
    assert code == EXIT_FUEL and "fuel exhausted" in err
    assert run(capsys, "regularize", EX1, "--fuel", "5")[0] == EXIT_FUEL


def test_invalid_input_to_transformations(capsys):
    assert run(capsys, "cutelim", EXBAD)[0] == EXIT_INVALID
    assert run(capsys, "regularize", EXBAD)[0] == EXIT_INVALID
    assert run(capsys, "translate", "--to", "hilbert", EXBAD)[0] == EXIT_INVALID


def test_translate_to_sequent(capsys, tmp_path):
    src = tmp_path / "d.json"
    src.write_text(dump_derivation(AxiomIV(p)))
    target = tmp_path / "d.proof"
    assert run(capsys, "translate", "--to", "sequent", str(src), "-o", str(target))[0] == EXIT_OK
    proof = load_proof(target.read_text())
    assert check_proof(proof)
    assert proof.endsequent == Sequent((), [], [AxiomIV(p).conclusion])


@pytest.mark.parametrize("sigma_text", ['["p"]', "# global assumptions\np\n"])
def test_translate_with_sigma(capsys, tmp_path, sigma_text):
    src = tmp_path / "d.json"
    src.write_text(dump_derivation(Nec(Assume(p))))
    sigma = tmp_path / "sigma"
    sigma.write_text(sigma_text)
    code, out, _ = run(capsys, "translate", "--to", "sequent", str(src), "--sigma", str(sigma))
    assert code == EXIT_OK
    proof = load_proof(out)
    assert proof.endsequent == Sequent([p], [], [BoxPlus(p)]) and check_proof(proof)
    assert run(capsys, "translate", "--to", "sequent", str(src))[0] == EXIT_INVALID


def test_translate_to_hilbert(capsys, tmp_path):
    src = tmp_path / "axp.proof"
    src.write_text(dump_proof(axp(Sequent((), [p], [p]))))
    code, out, _ = run(capsys, "translate", "--to", "hilbert", str(src))
    assert code == EXIT_OK
    d = load_derivation(out)
    assert check_derivation(d).conclusion == Imp(p, p)
    target = tmp_path / "ex1.json"
    assert run(capsys, "translate", "--to", "hilbert", EX1, "-o", str(target))[0] == EXIT_OK
    assert check_derivation(load_derivation(target.read_text()))


def test_stats(capsys):
    code, out, _ = run(capsys, "stats", EX1)
    assert code == EXIT_OK
    assert out.startswith("local_height=") and "backlinks=1" in out and "cutfree=yes" in out
    code, out, _ = run(capsys, "stats", EX1, "--format", "json")
    data = json.loads(out)
    assert data["slim"] is True and data["backlinks"] == 1 and "p" in data["candidates"]


def test_eq(capsys, tmp_path):
    copy = tmp_path / "copy.proof"
    copy.write_text(dump_proof(load_proof((FIXTURES / "ex1.proof").read_text())))
    assert run(capsys, "eq", EX1, str(copy)) == (EXIT_OK, "equal\n", "")
    assert run(capsys, "eq", EX1, EXBAD)[:2] == (EXIT_INVALID, "different\n")
    assert run(capsys, "eq", EX1, str(copy), "--fragment", "3")[0] == EXIT_OK
    assert json.loads(run(capsys, "eq", EX1, EXBAD, "--format", "json")[1]) == {"equal": False}


def test_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.proof"
    bad.write_text("{not json")
    assert run(capsys, "check", str(bad))[0] == EXIT_PARSE
    assert run(capsys, "check", EX1, "--ann", "((")[0] == EXIT_PARSE
    bad.write_text('{"version": 1, "root": 0, "nodes": [{"id": 0, "rule": "taut", "formula": "p ->"}]}')
    assert run(capsys, "translate", "--to", "sequent", str(bad))[0] == EXIT_PARSE


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, )[0] == EXIT_USAGE
    assert run(capsys, "frob")[0] == EXIT_USAGE
    assert run(capsys, "check")[0] == EXIT_USAGE
    assert run(capsys, "check", str(tmp_path / "missing.proof"))[0] == EXIT_USAGE
    assert run(capsys, "cutelim", EX1, "--fuel", "lots")[0] == EXIT_USAGE
    assert run(capsys, "translate", EX1)[0] == EXIT_USAGE
    assert run(capsys, "translate", "--to", "sequent", EX1, "--ann", "p")[0] == EXIT_USAGE


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "kplus", "check", EX1], capture_output=True, text=True)
    assert done.returncode == EXIT_OK and done.stdout == "Valid (annotation: p)\n"
