import csv
import io
import json

import pytest

from twistlab.cli import run
from twistlab.families import crossproduct_xi, family_2x2, family_sumtr6_222
from twistlab.twistmap import dumps, from_json, verify


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def row20_file(tmp_path, row20):
    path = tmp_path / "row20.json"
    path.write_text(dumps(row20))
    return str(path)


def test_verify_ok_and_failure(capsys, tmp_path):
    good = tmp_path / "good.json"
    good.write_text(dumps(family_2x2(3)))
    code, out, _ = call(capsys, "verify", str(good))
    assert code == 0 and json.loads(out) == {"is_twisting": True, "violations": []}
    obj = json.loads(dumps(family_2x2(3)))
    obj["A"][0][0][0][0] = "4"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out, _ = call(capsys, "verify", str(bad))
    report = json.loads(out)
    assert code == 1 and not report["is_twisting"]
    assert report["violations"][0] == {"cond": "C2", "witness": [1, None, 1, None, None, 1]}


def test_verify_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(dumps(family_sumtr6_222(2))))
    code, out, _ = call(capsys, "verify", "-")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["verify", "/nonexistent.json"],
    ["deform", "x.json"],
    ["family", "two_by_two_a", "--a", "0.5"],
    ["enumerate-standard", "--m", "2"],
    ["deform", "-", "--site", "1,2,3", "--lambda", "1"],
])
def test_usage_and_malformed_input_exit_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_domain_errors_exit_1(capsys):
    code, _, err = call(capsys, "family", "sumtr3_allones", "--a", "1")
    assert code == 1 and "avoid 0 and 1" in err
    code, _, err = call(capsys, "enumerate-standard", "--m", "4", "--n", "4")
    assert code == 1


def test_enumerate_and_classify(capsys):
    code, out, _ = call(capsys, "enumerate-standard", "--m", "2", "--n", "2")
    fams = [from_json(json.dumps(x)) for x in json.loads(out)]
    assert code == 0 and len(fams) == 7 and all(verify(f).is_twisting for f in fams)
    code, out, _ = call(capsys, "enumerate-standard", "--m", "2", "--n", "2", "--classify", "--format", "csv")
    table = list(csv.reader(io.StringIO(out)))
    assert table[0] == ["#", "sum Tr", "quiver", "Gamma", "Gamma~", "# equiv"]
    assert [r[-1] for r in table[1:]] == ["1", "4", "2"]
    code, out, _ = call(capsys, "classify-table", "--m", "3", "--n", "2", "--format", "json")
    rows = json.loads(out)
    assert len(rows) == 7 and sum(r["equiv"] for r in rows) == 55


def test_output_is_deterministic(capsys):
    first = call(capsys, "classify-table", "--m", "3", "--n", "2")
    second = call(capsys, "classify-table", "--m", "3", "--n", "2")
    assert first == second
    assert first[1].startswith("| # | sum Tr | quiver | Gamma | Gamma~ | # equiv |")


def test_family_command_matches_library(capsys):
    code, out, _ = call(capsys, "family", "two_by_two_a", "--a", "-5/3")
    assert code == 0 and out.strip() == dumps(family_2x2("-5/3"))
    code, out, _ = call(capsys, "family", "crossproduct_xi", "--vectors", "1,2,3;1,3,2")
    assert out.strip() == dumps(crossproduct_xi([(1, 2, 3), (1, 3, 2)]).family)
    code, out, _ = call(capsys, "family", "sumtr6_222", "--a", "2", "--variant", "2")
    assert from_json(out) == family_sumtr6_222(2, 2)


def test_quiver_radical_sites_deform(capsys, row20_file, row20):
    code, out, _ = call(capsys, "quiver", row20_file, "--dot")
    assert code == 0 and out.startswith("digraph quiver {")
    code, out, _ = call(capsys, "radical", row20_file)
    assert json.loads(out)["dim"] == 3 and json.loads(out)["square_zero"]
    code, out, _ = call(capsys, "sites", row20_file)
    assert json.loads(out) == [{"site": [[3, 1], [2, 2], [1, 3]]}]
    code, out, _ = call(capsys, "deform", row20_file, "--site", "3,1,2,2,1,3", "--lambda", "1/2", "--mu1")
    payload = json.loads(out)
    assert code == 0 and len(payload["mu1"]) == 4
    assert {e["value"] for e in payload["mu1"]} == {"1", "-1"}
    assert verify(from_json(json.dumps(payload["family"]))).is_twisting
    code, out, _ = call(capsys, "deform", row20_file, "--site", "1,1,2,2,1,3", "--lambda", "1")
    assert code == 1 and "not a deformation site" in json.loads(out)["error"]


def test_rep_command(capsys, tmp_path):
    path = tmp_path / "m3.json"
    path.write_text(dumps(crossproduct_xi([(1, 2, 3), (1, 3, 2)]).family))
    code, out, _ = call(capsys, "rep", str(path), "--index", "2", "--side", "B")
    payload = json.loads(out)
    assert code == 0 and payload["multiplicative"] and payload["unital"]
    assert payload["image_dim"] == 9
