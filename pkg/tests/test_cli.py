import json
from pathlib import Path

import pytest
from jsonschema import validate

from modinv.cli import main

GOLDENS = Path(__file__).parent / "goldens"
SCHEMA = json.loads(
    (Path(__file__).parent.parent / "src" / "modinv" / "schemas" / "report.schema.json").read_text()
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_dickson_golden_k2(capsys):
    code, out = run_cli(capsys, "dickson", "--p", "3", "--k", "2")
    assert code == 0
    assert out == (GOLDENS / "dickson_p3_k2.txt").read_text()


def test_dickson_golden_k3(capsys):
    code, out = run_cli(capsys, "dickson", "--p", "3", "--k", "3")
    assert code == 0
    assert out == (GOLDENS / "dickson_p3_k3.txt").read_text()


def test_dickson_rejects_even_prime(capsys):
    with pytest.raises(SystemExit):
        main(["dickson", "--p", "2", "--k", "2"])


def test_steenrod_table_golden(capsys):
    code, out = run_cli(capsys, "steenrod-table")
    assert code == 0
    assert out == (GOLDENS / "steenrod_table_p3.txt").read_text()


def test_output_deterministic(capsys):
    _, first = run_cli(capsys, "dickson", "--p", "3", "--k", "3")
    _, second = run_cli(capsys, "dickson", "--p", "3", "--k", "3")
    assert first == second


def test_invariants_gl2_json(capsys):
    code, out = run_cli(
        capsys, "invariants", "--group", "gl2", "--max-degree", "20", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["criterion"]["holds"] is False
    # Example 1: five generators L2^(p-1), Q21, M1, M2, M12
    assert len(data["generators"]) == 5
    assert data["free_module"]["status"] == "pass"
    assert set(data["family"]) == {"1", "2", "1+2"}


def test_invariants_trivial_group(capsys):
    code, out = run_cli(
        capsys, "invariants", "--group", "trivial2", "--max-degree", "10", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["criterion"]["holds"] is True
    assert data["criterion"]["iota"] == "1"
    # M_I = dx_I for the trivial group
    assert data["family"]["1"]["M"] == "dx1"
    assert data["family"]["1+2"]["M"] == "dx1dx2"


def test_invariants_sl3_json(capsys):
    code, out = run_cli(
        capsys, "invariants", "--group", "sl3", "--max-degree", "12", "--json"
    )
    assert code == 0
    data = json.loads(out)
    # Example 2: ten generators L3, Q32, Q31 and the seven M_I
    assert len(data["generators"]) == 10
    assert data["criterion"]["holds"] is False


def test_verify_f4_checks_filter_and_schema(capsys):
    code, out = run_cli(
        capsys, "verify-f4", "--max-degree", "8", "--checks", "kernel", "--json"
    )
    assert code == 0
    reports = json.loads(out)
    assert [r["check"] for r in reports] == ["kernel"]
    for r in reports:
        validate(r, SCHEMA)
        assert r["status"] == "pass"


def test_verify_f4_unknown_check(capsys):
    with pytest.raises(ValueError):
        main(["verify-f4", "--checks", "nonsense"])


def test_verify_f4_vacuous_degree_zero(capsys, monkeypatch):
    code, out = run_cli(
        capsys, "verify-f4", "--max-degree", "0", "--checks", "main,coker"
    )
    assert code == 0
    assert "all checks passed" in out


def test_verify_f4_exit_code_on_failure(capsys):
    # the pullback check carries the documented closing-display defect
    code, out = run_cli(capsys, "verify-f4", "--max-degree", "8", "--checks", "pullback")
    assert code == 1
    assert "full fiber product" in out


def test_hilbert_toda(capsys):
    code, out = run_cli(capsys, "hilbert", "--model", "toda", "--max-degree", "12")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "0: 1"
    assert lines[-1] == "12: 2"


def test_group_file_input(tmp_path, capsys):
    group_spec = {"p": 3, "generators": [[[2, 0], [0, 1]]], "name": "reflection"}
    path = tmp_path / "group.json"
    path.write_text(json.dumps(group_spec))
    rho = tmp_path / "rho.json"
    rho.write_text(json.dumps({"rho": ["x1^2", "x2"]}))
    code, out = run_cli(
        capsys,
        "invariants", "--group", str(path), "--rho", str(rho),
        "--max-degree", "8", "--json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["criterion"]["holds"] is True


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.txt"
    code = main(["dickson", "--p", "3", "--k", "2", "--output", str(target)])
    assert code == 0
    assert target.read_text().rstrip("\n") == (GOLDENS / "dickson_p3_k2.txt").read_text().rstrip("\n")
