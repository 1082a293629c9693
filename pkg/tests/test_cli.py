import json
import subprocess
import sys

import pytest

from pisotfield.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_pisot_min(capsys):
    code, doc = run_json(capsys, "pisot", "min", "q2")
    assert code == 0
    assert doc["coords"] == [1, 1] and doc["schema"] == "v1"
    assert doc["value"]["re"].startswith("2.414213562")


def test_ek_test_boundary(capsys):
    code, doc = run_json(capsys, "ek", "test", "q2", "--element", "2,0")
    assert code == 0 and doc["verdict"] == "out, boundary"


def test_field_info(capsys):
    code, doc = run_json(capsys, "field", "info", "cubic-3x-1")
    assert code == 0
    assert doc["signature"] == [3, 0] and doc["discriminant"] == 81
    code, doc = run_json(capsys, "field", "info", "q2")
    assert doc["B_K_audit"]["m"] == 2


def test_enumeration_commands(capsys):
    code, doc = run_json(capsys, "pisot", "enum", "q2", "--max", "12")
    assert [p["coords"] for p in doc["pisot"]] == [[1, 1], [2, 1], [2, 2], [3, 2], [4, 3], [5, 3], [5, 4], [6, 4]]
    code, doc = run_json(capsys, "oracle", "pisot", "q2", "--max", "12")
    assert code == 0 and len(doc["elements"]) == 8
    code, doc = run_json(capsys, "gaps", "q2", "--max", "12")
    assert doc["distinct_gap_count"] == 3 and doc["max_gap"]["coords"] == [1, 1]
    code, doc = run_json(capsys, "ek", "enum", "q2", "--max", "4")
    assert doc["elements"] == [[1, 0], [0, 1], [1, 1], [2, 1], [1, 2]]


def test_construction_commands(capsys):
    code, doc = run_json(capsys, "decompose", "q2", "--element", "1,0", "--count", "3")
    assert code == 0 and len(doc["decompositions"]) == 3
    code, doc = run_json(capsys, "theorem1", "q2", "--x1", "50", "--targets", "1/2", "--eps", "2/5", "--strategy", "direct")
    assert code == 0 and doc["theta"] == [26, 18]
    code, doc = run_json(capsys, "theorem1", "cubic-x-1", "--x1", "400", "--targets", "1/4,-1/5", "--eps", "1/2")
    assert code == 0 and doc["verified"] is True
    code, doc = run_json(capsys, "epsilon-pisot", "q2", "--eps", "1", "--from", "10")
    assert code == 0 and doc["verdict"] == "pisot"


def test_verify_commands(capsys):
    assert run(capsys, "verify", "corollary3", "cubic-3x-1", "--max", "20")[0] == 0
    assert run(capsys, "verify", "eq-ek-dk", "q2", "--bound", "4")[0] == 0
    assert run(capsys, "verify", "density", "q2")[0] == 0
    assert run(capsys, "verify", "discreteness", "q2", "--max", "50")[0] == 0


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "verify", "corollary3", "cubic-x-1", "--max", "2")[0] == 1
    code, _, err = run(capsys, "ek", "test", "q2", "--element", "2.5,0")
    assert code == 2 and "integers" in err
    assert run(capsys, "decompose", "q2", "--element", "3,0")[0] == 2
    assert run(capsys, "pisot", "min", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"defining_polynomial": [-2, 0, 2]}')
    assert run(capsys, "pisot", "min", str(bad))[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "field", "info", "q2", "--precision", "256", "--max-precision", "128")[0] == 2
    # two real roots about 2^-100 apart cannot be separated at 64 bits
    a = 2**40
    hard = tmp_path / "close-roots.json"
    hard.write_text(json.dumps({"defining_polynomial": [-2, 4 * a, -2 * a * a, 1]}))
    code, _, err = run(capsys, "field", "info", str(hard), "--precision", "64", "--max-precision", "64")
    assert code == 3 and "64 bits" in err


def test_csv_and_output_file(capsys, tmp_path):
    code, out, _ = run(capsys, "gaps", "q2", "--max", "12", "--format", "csv")
    lines = out.strip().split("\n")
    assert lines[0] == "kind,index,coords,value"
    assert len(lines) == 1 + 8 + 7
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "pisot", "min", "q7", "-o", str(target))
    assert out == "" and json.loads(target.read_text())["coords"] == [2, 1]


@pytest.mark.parametrize(
    "argv",
    [
        ["gaps", "cubic-x-1", "--max", "12"],
        ["pisot", "enum", "q3", "--max", "40"],
        ["ek", "enum", "cubic-3x-1", "--max", "5"],
    ],
)
def test_output_is_identical_across_workers(capsys, argv):
    outs = {run(capsys, *argv, "--workers", str(w))[1] for w in (1, 2, 4)}
    assert len(outs) == 1


def test_cache_dir(capsys, tmp_path):
    first = run(capsys, "gaps", "q3", "--max", "30", "--cache-dir", str(tmp_path))[1]
    files = list(tmp_path.glob("pisot-*.json"))
    assert len(files) == 1
    stored = json.loads(files[0].read_text())
    assert set(stored) == {"X", "coords"}
    assert run(capsys, "gaps", "q3", "--max", "30", "--cache-dir", str(tmp_path))[1] == first


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pisotfield.cli", "pisot", "min", "q3"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["coords"] == [1, 1]
