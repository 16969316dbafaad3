import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import CORPUS
from pathcat.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *args):
    argv = [str(CORPUS / a) if a.endswith((".cat", ".psi", ".yaml")) and "/" not in a else a
            for a in args]
    with pytest.raises(SystemExit) as exc:
        main(argv)
    out = capsys.readouterr()
    return exc.value.code, out.out, out.err


def machine(capsys, *args):
    code, out, err = run(capsys, *args, "--format", "machine")
    return code, json.loads(out) if out else None


def test_validate(capsys):
    code, doc = machine(capsys, "validate", "sq1.cat")
    assert code == 0 and doc == {"finitely_aligned": True, "morphisms": 9, "vertices": 4,
                                 "violations": []}


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "empty.cat")
    assert code == 2 and "vertex" in err
    assert run(capsys, "validate", str(tmp_path / "missing.cat"))[0] == 2
    bad = tmp_path / "bad.cat"
    bad.write_text("vertices: [v\narrows: {\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and f"{bad}:" in err and err.count(":") >= 3
    assert run(capsys, "validate", "sq1.cat", "--format", "xml")[0] == 2
    assert run(capsys, "align", "sq2.cat", "--paths", "alpha,nope")[0] == 2
    infinite = tmp_path / "loop.cat"
    infinite.write_text("vertices: [v]\narrows: [{id: a, src: v, rng: v}]\n")
    code, _, err = run(capsys, "validate", str(infinite))
    assert code == 2 and "finite" in err


def test_broken_table_exits_one(capsys, tmp_path):
    loop = tmp_path / "loop.cat"
    loop.write_text("table:\n  morphisms: [v, a]\n  src: {a: v}\n  rng: {a: v}\n"
                    "  compose: [[a, a, v]]\n")
    code, doc = machine(capsys, "validate", str(loop))
    assert code == 1
    assert {"no-inverses", "acyclicity"} <= {v["axiom"] for v in doc["violations"]}


def test_align(capsys):
    assert machine(capsys, "align", "sq2.cat", "--paths", "alpha,beta") == (0, {"join": ["eps0", "eps1"]})
    code, out, _ = run(capsys, "align", "sq2.cat")
    assert code == 0 and "eps0" in out


def test_zigzag(capsys):
    code, doc = machine(capsys, "zigzag", "sq1.cat", "alpha,beta")
    assert code == 0 and doc["map"] == {"delta0": "gamma0"}
    assert doc["shift_pairs"] == [["gamma0", "delta0"]]
    assert run(capsys, "zigzag", "sq1.cat", "alpha,beta;delta0,delta0")[0] == 2


def test_ring(capsys):
    code, doc = machine(capsys, "ring", "sq2.cat", "--vertex", "t", "--oracle")
    assert code == 0 and doc["rings"]["t"]["size"] == 32


def test_hom_check(capsys):
    assert machine(capsys, "hom-check", "sq2.cat", "sq2_hom.yaml")[1]["accepted"] is True
    code, doc = machine(capsys, "hom-check", "sq2.cat", "sq2_bad_hom.yaml")
    assert code == 1 and doc == {"accepted": False, "witness": ["alpha", "beta"]}


def test_boundary_and_fe(capsys):
    code, doc = machine(capsys, "boundary", "sq2.cat", "--oracle")
    assert code == 0 and doc["boundary_size"] == 8
    code, out, _ = run(capsys, "fe", "sq2.cat")
    assert code == 0 and "alpha" in out


def test_groupoid(capsys):
    code, doc = machine(capsys, "groupoid", "sq2.cat", "--on-boundary", "--oracle")
    assert code == 0 and len(doc["orbits"]) == 2 and doc["units"] == 8
    code, _ = machine(capsys, "groupoid", "sq1.cat", "--degree", "sq1.psi")
    assert code == 0


def test_degree(capsys):
    code, doc = machine(capsys, "degree", "sq1.cat")
    assert code == 0 and doc["H"] == "Z^3"
    assert machine(capsys, "degree", "sq1.cat", "sq1.psi")[0] == 0
    code, doc = machine(capsys, "degree", "glued.cat", "glued.psi")
    assert code == 0 and doc["nondegenerate"] == "holds"
    code, doc = machine(capsys, "degree", "free2.cat", "free2.psi")
    assert code == 0 and doc["bound"] == 3


def test_degree_failure_exits_one(capsys, tmp_path):
    psi = tmp_path / "zero.psi"
    psi.write_text("psi: {alpha: [0], beta: [0], gamma0: [0], delta0: [0]}\n")
    assert run(capsys, "degree", "sq1.cat", str(psi))[0] == 1


@pytest.mark.parametrize("name", ["sq1.cat", "sq2.cat", "flip.cat", "glued.cat"])
def test_analyze_with_oracle(capsys, name):
    code, doc = machine(capsys, "analyze", name, "--oracle")
    assert code == 0 and doc["bound"] is None


def test_analyze_balls(capsys):
    code, doc = machine(capsys, "analyze", "free2.cat")
    assert code == 0 and doc["aperiodic"]["value"] is None and doc["bound"] == 3
    assert doc["locally_contractive_hypothesis"]["value"] is True
    code, doc = machine(capsys, "analyze", "kgraph.cat", "--bound", "2")
    assert doc["bound"] == 2 and doc["aperiodic"]["value"] is False


def test_amalgamate(capsys):
    code, doc = machine(capsys, "amalgamate", "free2.cat")
    assert code == 0 and doc["size"] == 15 and doc["finite"] is False
    code, doc = machine(capsys, "amalgamate", "glued.cat")
    assert code == 0 and doc["size"] == 17


def test_emit_golden(capsys):
    code, out, _ = run(capsys, "emit", "--flavor", "ck", "sq2.cat")
    assert code == 0 and out == (GOLDEN / "sq2_ck.txt").read_text()
    code, out, _ = run(capsys, "emit", "--flavor", "ck", "sq2.cat", "--format", "machine")
    assert out == (GOLDEN / "sq2_ck.json").read_text()
    assert run(capsys, "emit", "free2.cat")[0] == 2


def test_verify(capsys):
    code, doc = machine(capsys, "verify", "sq2.cat", "--flavor", "toeplitz")
    assert code == 0 and doc["dimension"] == 13 and doc["ck4_failures"]
    code, doc = machine(capsys, "verify", "sq2.cat", "--flavor", "ck")
    assert code == 0 and doc["dimension"] == 8 and not doc["failed"]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "validate", "sq2.cat", "--format", "machine", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["morphisms"] == 13


COMMANDS = [
    ["validate", "sq1.cat"], ["align", "sq2.cat"], ["zigzag", "sq2.cat", "alpha,beta"],
    ["ring", "sq2.cat"], ["hom-check", "sq2.cat", "sq2_hom.yaml"], ["boundary", "glued.cat"],
    ["fe", "sq2.cat"], ["groupoid", "sq1.cat"], ["degree", "sq1.cat", "sq1.psi"],
    ["analyze", "free2.cat"], ["analyze", "kgraph.cat"], ["amalgamate", "glued.cat"],
    ["emit", "sq2.cat"], ["verify", "sq1.cat", "--flavor", "ck"],
]


@pytest.mark.parametrize("args", COMMANDS, ids=lambda a: "-".join(a[:2]))
def test_machine_output_is_deterministic(capsys, args):
    first = run(capsys, *args, "--format", "machine")
    second = run(capsys, *args, "--format", "machine")
    assert first == second and first[0] in (0, 1)
    json.loads(first[1])


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "pathcat", "validate", str(CORPUS / "sq2.cat")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "13" in out.stdout
    out = subprocess.run([sys.executable, "-m", "pathcat", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for name in ["validate", "align", "zigzag", "ring", "hom-check", "boundary", "fe", "groupoid",
                 "degree", "analyze", "amalgamate", "emit", "verify"]:
        assert name in out.stdout
