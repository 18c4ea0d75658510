"""CLI verbs, schemas, exit codes."""

import json

import pytest

from q2perm import BranchingSystem, equals
from q2perm.catalog import catalog
from q2perm.cli import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, run


def run_json(capsys, *argv):
    code = run(list(argv) + ["--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_extend_canonical(capsys):
    code, data = run_json(capsys, "extend", "--catalog", "canonical",
                          "--window", "300")
    assert code == EXIT_OK
    assert data["verdict"] == "extendible"
    assert data["count"] == "Finite(1)"
    assert data["tau"]["rules"] == [{"residue": 0, "slope": 1, "offset": 1}]
    assert data["verification"]["passed"] is True
    assert data["schema"] == "q2perm/1"


def test_endo_table_row(capsys):
    code, data = run_json(capsys, "endo-table", "--row", "13")
    assert code == EXIT_OK
    row = data["rows"][0]
    assert row["rep_level_extendible"] is False
    assert row["asserted_extendible"] is False
    assert row["agrees"] is True


def test_endo_table_full(capsys):
    code, data = run_json(capsys, "endo-table")
    assert code == EXIT_OK
    assert len(data["rows"]) == 24
    assert all(r["agrees"] for r in data["rows"])


def test_classify_onekk_after_extension(capsys):
    code, data = run_json(capsys, "classify", "--catalog", "onekk:2",
                          "--window", "200")
    assert code == EXIT_OK
    assert "NotPermutativelyDecomposable" in data["classification"]


def test_classify_not_extendible_row(capsys):
    code, data = run_json(capsys, "classify", "--catalog", "kawamura:11",
                          "--window", "100")
    assert code == EXIT_OK
    assert "no unitary level" in data["classification"]


def test_validate_and_analyze(capsys):
    code, data = run_json(capsys, "validate", "--catalog", "p12_realization1")
    assert code == EXIT_OK and data["ok"] is True
    code, data = run_json(capsys, "analyze", "--catalog", "canonical")
    assert code == EXIT_OK
    assert data["sigma2"]["core_members"] == [0]
    assert data["sigma1"]["core_members"] == [-1]
    assert data["sigma2"]["point_spectrum"] == [
        {"roots_of_unity_order": 1, "multiplicity": 1}]


def test_decompose_chi(capsys):
    code, data = run_json(capsys, "decompose", "--catalog", "chi:1",
                          "--window", "100")
    assert code == EXIT_OK
    assert data["q2_components"]["count"] == 2
    classes = sorted(c["class"] for c in data["q2_components"]["components"])
    assert classes[0] == "CanonicalQ2"
    assert classes[1].startswith("InfinitePI((12)")


def test_coding_verb(capsys):
    code, data = run_json(capsys, "coding", "--catalog", "canonical",
                          "--index", "-1", "--depth", "6")
    assert code == EXIT_OK
    assert data["digits"] == "111111"
    assert data["certified_tail"] == {"preperiod": "", "period": "1"}


def test_state_eval(capsys):
    code, data = run_json(capsys, "state-eval", "--z", "1/5", "--alpha", "12",
                          "--beta", "21", "--upower", "3")
    assert code == EXIT_OK
    assert data["hypothesis_flag"] is False
    assert data["value"] == "1/4 * e^(2pi i 3/5)"
    code = run(["state-eval", "--z", "1/3", "--alpha", "1", "--beta", "1"])
    assert code == EXIT_ERROR


def test_state_consistency_verb(capsys):
    code, data = run_json(capsys, "state-eval", "--z", "1/5",
                          "--consistency", "4")
    assert code == EXIT_OK
    assert data["consistency"]["level_sums_ok"] is True


def test_catalog_round_trip(capsys, tmp_path):
    code, data = run_json(capsys, "catalog", "p12_realization2")
    assert code == EXIT_OK
    parsed = BranchingSystem.from_json(data["system"])
    original = catalog("p12_realization2").system
    assert equals(parsed.sigma1, original.sigma1)
    assert equals(parsed.sigma2, original.sigma2)
    # file input path
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(data["system"]))
    code2, data2 = run_json(capsys, "validate", "--input", str(path))
    assert code2 == EXIT_OK and data2["ok"] is True


def test_unknown_catalog_is_error(capsys):
    assert run(["validate", "--catalog", "nonsense"]) == EXIT_ERROR


def test_inconclusive_exit_code(capsys):
    # window union-find without anchors cannot certify components
    code, data = run_json(capsys, "decompose", "--catalog", "kawamura:(12)",
                          "--window", "64")
    assert code == EXIT_INCONCLUSIVE


def test_exit_codes_deterministic(capsys):
    for _ in range(2):
        assert run(["extend", "--catalog", "kawamura:11", "--format",
                    "json"]) == EXIT_OK
        capsys.readouterr()
