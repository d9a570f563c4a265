import json
from fractions import Fraction

import pytest

from dicycles.cli import main
from dicycles.core import build
from dicycles.io import digraph_from_json, digraph_to_json, dumps, to_dot


def run(tmp_path, *argv):
    return main([str(a).replace("@", str(tmp_path) + "/") for a in argv])


def load(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def test_digraph_json_roundtrip():
    D = build(3, [(0, 1), (1, 2), (2, 0)], {0: "a"})
    w = {a: Fraction(i + 1, 3) for i, a in enumerate(D.arcs)}
    again, w2 = digraph_from_json(json.loads(dumps(digraph_to_json(D, w))))
    assert again == D and w2 == w and again.labels == {0: "a"}


def test_dot_marks_highlighted_arcs():
    text = to_dot(build(3, [(0, 1), (1, 0), (1, 2)]), [(0, 1)])
    assert "0 -> 1 [style=bold];" in text and "1 -> 2;" in text


def test_eqwall_roundtrip(tmp_path, capsys):
    assert run(tmp_path, "gen", "eqwall", "--k", 2, "--out", "@w.json") == 0
    assert run(tmp_path, "verify", "eqwall", "--in", "@w.json", "--out", "@v.json") == 0
    res = load(tmp_path, "v.json")["results"]
    (entry,) = res.values()
    assert entry["ok"] and entry["L"] == 16 and entry["enumeration"]["lengths"] == [16]


def test_dk_structural(tmp_path):
    assert run(tmp_path, "gen", "dk", "--k", 2, "--out", "@d.json") == 0
    assert run(tmp_path, "verify", "dk", "--in", "@d.json", "--budget", 500, "--out", "@v.json") == 0
    (entry,) = load(tmp_path, "v.json")["results"].values()
    assert entry["structural"] == "verified" and entry["exhaustive"] == "inconclusive"


def test_pack_dispatch_minor(tmp_path):
    assert run(tmp_path, "gen", "minor", "--t", 9, "--seed", 2, "--out", "@c.json") == 0
    assert run(tmp_path, "pack", "--mode", "dispatch", "--cert", "@c.json", "--k", 3,
               "--out", "@p.json", "--manifest", "@m.json") == 0
    out = load(tmp_path, "p.json")
    assert len(out["packing"]["cycles"]) == 3 and out["verdict"]["ok"]
    manifest = load(tmp_path, "m.json")
    assert manifest["ok"] and manifest["verdicts"]["ok"]
    assert set(manifest["inputs"]) == {str(tmp_path / "c.json")}
    assert run(tmp_path, "verify", "packing", "--in", "@p.json", "--out", "@v.json") == 0


def test_pack_strong_and_export(tmp_path):
    assert run(tmp_path, "gen", "flat", "--k", 2, "--case", "5", "--out", "@f.json") == 0
    assert run(tmp_path, "verify", "flat", "--in", "@f.json", "--out", "@v.json") == 0
    assert run(tmp_path, "pack", "--mode", "strong", "--cert", "@f.json", "--k", 2, "--out", "@p.json") == 0
    assert run(tmp_path, "export", "--in", "@p.json", "--out", "@p.dot") == 0
    assert (tmp_path / "p.dot").read_text().count("style=bold") >= 4


def test_pack_nonstrong(tmp_path):
    assert run(tmp_path, "gen", "nonstrong", "--case1", "2", "--case2", "4", "--out", "@n.json") == 0
    assert run(tmp_path, "pack", "--mode", "nonstrong", "--cert", "@n.json", "--out", "@p.json") == 0
    assert len(load(tmp_path, "p.json")["lengths"]) == 3


def test_verify_dtd(tmp_path):
    assert run(tmp_path, "gen", "fk", "--k", 3, "--out", "@f.json") == 0
    assert run(tmp_path, "verify", "dtd", "--in", "@f.json", "--out", "@v.json") == 0
    (entry,) = load(tmp_path, "v.json")["results"].values()
    assert entry["width"] == 1


def test_tampered_packing_fails_with_exit_one(tmp_path):
    run(tmp_path, "gen", "minor", "--t", 5, "--out", "@c.json")
    run(tmp_path, "pack", "--mode", "dispatch", "--cert", "@c.json", "--k", 2, "--out", "@p.json")
    data = load(tmp_path, "p.json")
    data["packing"]["cycles"].append(data["packing"]["cycles"][0])
    (tmp_path / "p.json").write_text(json.dumps(data))
    assert run(tmp_path, "verify", "packing", "--in", "@p.json", "--out", "@v.json") == 1


@pytest.mark.parametrize("argv", [["bogus"], ["gen"], ["pack", "--mode", "strong"],
                                  ["verify", "dtd", "--in", "@missing.json"]])
def test_usage_errors_exit_two(tmp_path, argv, capsys):
    assert run(tmp_path, *argv) == 2


def test_mode_certificate_mismatch_exits_two(tmp_path):
    run(tmp_path, "gen", "minor", "--t", 5, "--out", "@c.json")
    assert run(tmp_path, "pack", "--mode", "strong", "--cert", "@c.json", "--k", 1) == 2


@pytest.mark.parametrize("argv", [["gen", "dk", "--k", 1, "--N", 2], ["gen", "flat", "--k", 2, "--case", "dense", "--seed", 5],
                                  ["gen", "minor", "--t", 6, "--seed", 1]])
def test_outputs_are_byte_identical(tmp_path, argv):
    run(tmp_path, *argv, "--out", "@a.json")
    run(tmp_path, *argv, "--out", "@b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_selftest_subset(tmp_path, capsys):
    assert run(tmp_path, "selftest", "--only", 3, 5) == 0
    out = capsys.readouterr().out
    assert "[PASS]  3" in out and "[PASS]  5" in out
