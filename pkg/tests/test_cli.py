import json
import subprocess
import sys
from importlib.resources import files

import jsonschema
import pytest

from arion import cli
from arion.core import InternalInvariant
from arion.params import PROFILES, profile
from arion.sponge import arion_hash

P = "bn254_n3_d1-5_d2-257"


def schema(name):
    return json.loads((files("arion") / "schemas" / f"{name}.json").read_text())


def call(capsys, *argv, rc=0):
    assert cli.run(list(argv)) == rc
    out, err = capsys.readouterr()
    return out, err


def call_json(capsys, name, *argv, rc=0):
    out, _ = call(capsys, *argv, rc=rc)
    doc = json.loads(out)
    jsonschema.validate(doc, schema(name))
    return doc


def test_gen_params(capsys, tmp_path):
    out = tmp_path / "p.json"
    doc = call_json(capsys, "params", "gen-params", "--prime", "bn254", "--n", "3", "--d1", "5", "--out", str(out))
    assert doc["params_id"] == profile(P).params_id and json.loads(out.read_text()) == doc


def test_permute_roundtrip(capsys):
    doc = call_json(capsys, "permute", "permute", "--params", P, "--state", "1,2,3", "--key", "4,5,6")
    back = call_json(capsys, "permute", "permute", "--params", P, "--state", ",".join(doc["output"]),
                     "--key", "4,5,6", "--inverse")
    assert [int(v, 16) for v in back["output"]] == [1, 2, 3]


def test_hash_matches_library(capsys):
    doc = call_json(capsys, "hash", "hash", "--params", P, "--input", "1,2,3", "--json")
    assert int(doc["digest"][0], 16) == arion_hash([1, 2, 3], profile(P))
    plain, _ = call(capsys, "hash", "--params", P, "--input", "1,2,3")
    again, _ = call(capsys, "hash", "--params", P, "--input", "1,2,3")
    assert plain == again and plain.strip() == doc["digest"][0]


def test_hash_bytes_file(capsys, tmp_path):
    f = tmp_path / "m.bin"
    f.write_bytes(b"abc")
    doc = call_json(capsys, "hash", "hash", "--params", P, "--bytes", str(f), "--json")
    assert int(doc["input"][0], 16) == 3


def test_merkle(capsys, tmp_path):
    leaves = tmp_path / "l.json"
    leaves.write_text(json.dumps(["1", "2", "3", "4"]))
    doc = call_json(capsys, "merkle", "merkle", "--params", P, "--leaves", str(leaves), "--prove", "3")
    assert doc["arity"] == 2 and len(doc["path"]) == 2


def test_count(capsys):
    doc = call_json(capsys, "count", "count", "--scheme", "r1cs", "--hash", "poseidon", "--n", "3", "--d", "5",
                    "--json")
    assert doc["count"] == 240
    out, _ = call(capsys, "count", "--scheme", "plonk3", "--n", "3", "--d1", "3")
    assert out.strip() == "147"
    call_json(capsys, "count_report", "count", "--report")


def test_r1cs_emit_and_check(capsys, tmp_path):
    cs, w = tmp_path / "cs.json", tmp_path / "w.json"
    doc = call_json(capsys, "r1cs_emit", "r1cs-emit", "--params", P, "--out", str(cs), "--message", "1,2",
                    "--witness-out", str(w))
    jsonschema.validate(json.loads(cs.read_text()), schema("r1cs_system"))
    jsonschema.validate(json.loads(w.read_text()), schema("r1cs_witness"))
    assert int(doc["digest"][0], 16) == arion_hash([1, 2], profile(P))
    ok = call_json(capsys, "r1cs_check", "r1cs-check", "--system", str(cs), "--witness", str(w))
    assert ok["satisfied"] and ok["violated_count"] == 0
    wd = json.loads(w.read_text())
    wd["assignment"][5] = format((int(wd["assignment"][5], 16) + 1), "x")
    w.write_text(json.dumps(wd))
    bad = call_json(capsys, "r1cs_check", "r1cs-check", "--system", str(cs), "--witness", str(w), rc=1)
    assert not bad["satisfied"] and bad["violated_count"] > 0


def test_estimate(capsys):
    doc = call_json(capsys, "estimate", "estimate", "--params", P, "--json")
    assert len(doc["estimates"]) == 12
    out, _ = call(capsys, "estimate", "--params", P)
    assert len(out.splitlines()) == 12


def test_lab(capsys):
    doc = call_json(capsys, "density", "lab", "density", "--p", "11", "--n", "3", "--d1", "3", "--d2", "3",
                    "--seeds", "1", "--json")
    assert doc["reports"][0]["degrees"] == [29]
    assert call_json(capsys, "bijection", "lab", "bijection", "--p", "11")["bijective"]
    assert call_json(capsys, "mds", "lab", "mds", "--n", "3", "--p", "bn254")["mds"]


def test_vectors(capsys, tmp_path):
    out = tmp_path / "v.jsonl"
    call(capsys, "vectors", "--out", str(out))
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(lines) == len(PROFILES) * 26 == 104
    for line in lines:
        jsonschema.validate(line, schema("vector"))
    pid = profile(P).params_id
    h = next(line for line in lines if line["type"] == "hash" and line["params_id"] == pid and len(line["input"]) == 2)
    assert int(h["output"][0], 16) == arion_hash([int(v, 16) for v in h["input"]], profile(P))


@pytest.mark.parametrize("argv", [
    ["gen-params", "--prime", "bn254", "--n", "3", "--d1", "3"],
    ["bogus"],
    ["permute", "--params", P, "--state", "1,2"],
    ["permute", "--params", "nope", "--state", "1,2,3"],
    ["count", "--scheme", "plonk3", "--hash", "anemoi", "--n", "3", "--d", "3"],
    ["lab", "mds", "--n", "5", "--p", "10007"],
    ["lab", "bijection", "--p", "1033", "--n", "2", "--d1", "5", "--d2", "5"],
])
def test_invalid_input_exits_1(capsys, argv):
    _, err = call(capsys, *argv, rc=1)
    jsonschema.validate(json.loads(err), schema("error"))


def test_internal_invariant_exits_2(capsys, monkeypatch):
    def boom(*a, **k):
        raise InternalInvariant("broken")
    monkeypatch.setattr(cli, "arion_permute", boom)
    _, err = call(capsys, "permute", "--params", P, "--state", "1,2,3", rc=2)
    assert json.loads(err)["error"] == "internal"


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "arion.cli", "count", "--scheme", "r1cs", "--hash", "arion",
                        "--n", "3", "--d", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "102"
