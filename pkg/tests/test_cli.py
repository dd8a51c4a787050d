import json
import subprocess
import sys

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from systole_lab.cli import emit, run
from systole_lab.errors import UnsupportedFormat
from systole_lab.generators import GENERATORS


def ok(argv):
    code, out, diag = run(argv)
    assert code == 0, diag
    return json.loads(out)


def write_builtin(tmp_path, name, k=0):
    path = tmp_path / f"{name}-{k}.json"
    code, _, diag = run(["gen", name, "-k", str(k), "--out", str(path)])
    assert code == 0, diag
    return path


def test_gen_square_validates(tmp_path):
    res = ok(["validate", "--input", str(write_builtin(tmp_path, "torus-square", 2))])["results"]
    assert res["genus"] == 1 and res["orientable"]
    assert res["area"] == pytest.approx(1.0, abs=1e-12)


def test_gen_octagon_and_rp2(tmp_path):
    res = ok(["validate", "--input", str(write_builtin(tmp_path, "genus2-octagon", 1))])["results"]
    assert res["euler_characteristic"] == -2
    res = ok(["validate", "--input", str(write_builtin(tmp_path, "rp2-icosa", 0))])["results"]
    assert res["euler_characteristic"] == 1 and not res["orientable"]


@pytest.mark.parametrize("name", sorted(GENERATORS))
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_round_trip(tmp_path, name, k):
    path = write_builtin(tmp_path, name, k)
    res = ok(["validate", "--input", str(path)])["results"]
    assert res["valid"]
    direct = ok(["validate", "--input", f"builtin:{name}", "-k", str(k)])["results"]
    assert res == direct


def test_gen_torus_model():
    code, out, _ = run(["gen", "torus-hex", "--torus"])
    assert code == 0 and "basis" in json.loads(out)


def test_systole_report(tmp_path):
    rep = ok(["systole", "--input", str(write_builtin(tmp_path, "torus-square"))])
    res = rep["results"]
    assert res["systole"] == 1.0 and res["kind"] == "homotopy" and res["certified"] is True
    assert set(rep) == {"command", "version", "results", "warnings"}


def test_systole_z2_and_lattice(tmp_path):
    assert ok(["systole", "--input", "rp2-icosa", "--kind", "z2"])["results"]["kind"] == "homology-z2"
    tor = tmp_path / "t.json"
    tor.write_text(json.dumps({"tau": [0.5, 0.1]}))
    assert ok(["systole", "--input", str(tor)])["results"]["systole"] == pytest.approx(0.2, abs=1e-12)


def test_check_hex_constants(tmp_path):
    res = ok(["check", "--input", str(write_builtin(tmp_path, "torus-hex")), "--suite", "constants"])["results"]
    loewner = next(c for c in res["checks"] if c["check"] == "loewner")
    assert loewner["verdict"] is True
    assert res["all_pass"]


def test_check_sabourau_carries_gate_note():
    rep = ok(["check", "--input", "torus-square", "--suite", "sabourau", "--alpha", "0.05", "--beta", "0.1"])
    assert rep["results"]["all_pass"]
    assert any("4*alpha + beta" in w for w in rep["warnings"])
    code, _, diag = run(["check", "--input", "torus-square", "--suite", "sabourau", "--alpha", "0.2", "--beta", "0.2"])
    assert code == 1 and "InvalidParams" in diag


def test_other_verbs():
    assert ok(["ratio", "--input", "torus-hex"])["results"]["ratio"] == pytest.approx(0.866025403784, abs=1e-11)
    assert ok(["pack", "--input", "torus-square", "-k", "3", "--radius", "0.15"])["results"]["doubled_cover_gaps"] == 0
    nerve = ok(["nerve", "--input", "torus-square", "-k", "2", "--radius", "0.1", "--factor", "2"])["results"]
    assert nerve["factor"] == 2 and nerve["simplices"]["0"] == len(nerve["balls"])
    adm = ok(["admissible", "--input", "torus-square", "-k", "4", "--alpha", "26", "--radius", str(1 / 12),
              "--R0", str(1 / 12), "--r", str(1 / 120)])["results"]
    assert adm["admissible"] is True
    opt = ok(["optimize", "--tau", "0,1"])["results"]
    assert opt["ratio"] == pytest.approx(0.8660254, abs=1e-4)
    orbit = ok(["check", "--input", "torus-hex", "--suite", "orbit"])["results"]
    assert orbit["all_pass"]


def test_missing_file():
    code, out, diag = run(["systole", "--input", "missing.json"])
    assert code == 1 and out == b"" and diag


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["systole"], ["systole", "--input", "torus-square", "--kind", "x"],
    ["pack", "--input", "torus-square"], ["entropy", "--input", "torus-square"],
    ["entropy", "--input", "torus-square", "--window", "3"], ["gen", "nope"],
    ["gen", "torus-rect", "--param", "width"], ["systole", "--input", "sphere-tetra"],
    ["admissible", "--input", "torus-square", "--alpha", "25", "--radius", "0.05", "--R0", "0.1"],
    ["systole", "--input", "torus-square", "-k", "-1"],
])
def test_input_errors_exit_one(argv):
    code, out, diag = run(argv)
    assert code == 1 and diag.startswith("error")


def test_resource_errors_exit_two():
    code, _, diag = run(["optimize", "--tau", "0,1", "--max-iter", "3"])
    assert code == 2 and "MaxIterations" in diag
    code, _, diag = run(["admissible", "--input", "genus2-octagon", "--alpha", "26", "--system", "--R0", str(1 / 12)])
    assert code == 2 and "NoAdmissibleBall" in diag


def test_unsupported_format():
    code, _, diag = run(["systole", "--input", "torus-square", "--format", "xml"])
    assert code == 1 and "UnsupportedFormat" in diag
    with pytest.raises(UnsupportedFormat):
        emit({"a": 1}, "xml")


def test_csv_growth_table():
    code, out, _ = run(["entropy", "--input", "torus-square", "--window", "0:4", "--points", "5", "--format", "csv"])
    lines = out.decode().splitlines()
    assert code == 0
    assert lines[0] == "L,count"
    assert lines[1:] == ["0,1", "1,5", "2,13", "3,29", "4,49"]


def test_csv_key_value():
    code, out, _ = run(["ratio", "--input", "torus-square", "--format", "csv"])
    lines = out.decode().splitlines()
    assert lines[0] == "key,value" and "ratio,1" in lines


def test_emit_canonical():
    a = emit({"b": 1.0 / 3, "a": [1, 2.5, float("inf")], "c": {"z": True, "y": None}})
    assert a == b'{"a": [1, 2.5, null], "b": 0.333333333333, "c": {"y": null, "z": true}}\n'
    assert emit({"a": 1}) == emit({"a": 1})


@pytest.mark.parametrize("argv", [
    ["systole", "--input", "genus2-octagon"],
    ["entropy", "--input", "genus2-octagon", "--window", "1:3", "--points", "5"],
    ["optimize", "--input", "torus-square", "--max-iter", "60", "--seed", "7"],
    ["admissible", "--input", "torus-square", "-k", "3", "--alpha", "26", "--system", "--R0", str(1 / 12)],
    ["check", "--input", "rp2-icosa", "--suite", "burago-hebda"],
])
def test_byte_identical(argv):
    a, b = run(argv), run(argv)
    assert a[0] == 0 and a == b


def test_timing_flag():
    rep = ok(["ratio", "--input", "torus-square", "--timing"])
    assert rep["wall_time"] >= 0


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.one_of(
    st.binary(max_size=200),
    st.text(max_size=200).map(str.encode),
    st.recursive(st.none() | st.booleans() | st.integers() | st.floats() | st.text(max_size=5),
                 lambda c: st.lists(c, max_size=4) | st.dictionaries(st.sampled_from(
                     ["triangles", "lengths", "basis", "tau", "x"]), c, max_size=4),
                 max_leaves=20).map(lambda o: json.dumps(o).encode()),
))
def test_fuzzed_inputs_exit_one(tmp_path, payload):
    path = tmp_path / "fuzz.json"
    path.write_bytes(payload)
    for verb in ("validate", "systole"):
        code, _, diag = run([verb, "--input", str(path)])
        assert code == 1 and diag.startswith("error"), (payload, code, diag)


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "systole_lab.cli", "systole", "--input", "missing.json"],
                          capture_output=True)
    assert proc.returncode == 1 and b"error" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "systole_lab.cli", "ratio", "--input", "torus-square"],
                          capture_output=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["results"]["ratio"] == 1.0
