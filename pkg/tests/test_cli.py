import json
import random
import subprocess
import sys

import pytest

from perturbia import renorm
from perturbia.cli import ENVELOPE_SCHEMA, dispatch, main


def run(*argv):
    env = dispatch(list(argv))
    env.validate()
    return env


def test_el_envelope():
    env = run("el", "--dim", "4", "--lagrangian", "dd(phi,phi)+m^2*phi^2")
    data = env.to_json()
    assert data["exit_code"] == 0 and data["schema_version"] == ENVELOPE_SCHEMA["properties"]["schema_version"]["const"]
    text = data["payload"]["euler_lagrange"]["phi"]["text"]
    assert text == "2*m^2*phi + 2*d3(d3(phi)) + 2*d2(d2(phi)) + 2*d1(d1(phi)) - 2*d0(d0(phi))"


def test_zerodim_csv():
    body = run("zerodim", "z", "--order-lambda", "3", "--format", "csv").render()
    assert "3,0,-385,3072" in body.splitlines()
    assert body.splitlines()[0] == "a,b,coeff_num,coeff_den"


def test_zerodim_json_coefficients_are_ratios():
    env = run("zerodim", "w", "--order-lambda", "2", "--order-j", "2", "--format", "json")
    coeffs = {(c["a"], c["b"]): c["coeff"] for c in env.payload["coefficients"]}
    assert coeffs[(2, 0)] == "1/12"


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_missing_file_flag_is_usage():
    assert main(["renorm", "compose", "--c1", "x.json"]) == 2


def test_domain_and_resource_codes(capsys):
    assert main(["el", "--dim", "2", "--lagrangian", "d3(phi)"]) == 3
    assert main(["free", "greens", "--n", "16"]) == 4
    err = capsys.readouterr().err
    assert '"exit_code": 4' in err


def test_vertex_cap_from_environment(monkeypatch):
    monkeypatch.setenv("PERTURBIA_MAX_GRAPH_VERTICES", "2")
    assert dispatch(["graphs", "enum", "--v4", "2", "--v1", "2"]).exit_code == 4


def test_noether_commands():
    env = run("noether", "--dim", "4", "--complex", "phi", "--lagrangian", "dd(conj(phi),phi)+m^2*conj(phi)*phi",
              "--gen", "phi=I*phi", "--gen", "conj(phi)=-I*conj(phi)")
    assert env.payload["conservation"] == "conserved"
    env = run("noether", "--dim", "2", "--lagrangian", "dd(phi,phi)+m^2*phi^2", "--translation", "1")
    assert env.payload["conservation"] == "conserved"
    assert run("noether", "--dim", "2", "--lagrangian", "phi^2", "--gen", "phi=phi").exit_code == 3


def test_graph_commands(tmp_path):
    env = run("graphs", "enum", "--v4", "2", "--v1", "0")
    assert sorted(c["aut_order"] for c in env.payload["classes"]) == [16, 48, 128]
    assert env.payload["matching_check"]
    path = tmp_path / "g.json"
    path.write_text(json.dumps(env.payload["classes"][0]["graph"]))
    out = run("graphs", "analyze", "--graph", str(path))
    assert out.payload["canonical_code"] == env.payload["classes"][0]["canonical_code"]


def test_free_commands():
    assert run("free", "greens", "--n", "6").payload["count"] == 15
    csv = run("free", "propagator", "--m", "1.0", "--grid", "4096", "--format", "csv").render().splitlines()
    assert csv[0] == "x,f" and len(csv) == 4097 + 1
    g = run("free", "gauss", "--matrix", '[["0.5+1i"]]', "--j", "[0.3]").payload
    assert g["closed_form"] == pytest.approx(g["quadrature"])


def test_renorm_commands(tmp_path):
    U = renorm.Universe.build(3, 6)
    rng = random.Random(4)
    paths = []
    for k in range(2):
        p = tmp_path / f"c{k}.json"
        p.write_text(json.dumps(renorm.CountertermMap.random(U, rng).to_json()))
        paths.append(str(p))
    env = run("renorm", "compose", "--c1", paths[0], "--c2", paths[1], "--bound", "3")
    c0, c1 = (renorm.CountertermMap.from_json(U, json.load(open(p))) for p in paths)
    assert renorm.CountertermMap.from_json(U, env.payload) == renorm.compose(c0, c1)
    inv = run("renorm", "inverse", "--c", paths[0]).payload
    assert renorm.CountertermMap.from_json(U, inv) == renorm.inverse(c0)
    assert run("renorm", "dyson", "--d", "2").payload["max_power"] == "unbounded"


def test_clifford_commands():
    assert run("clifford", "classify", "--p", "3", "--q", "1").payload["label"] == "M4(R)"
    assert run("clifford", "center", "--p", "0", "--q", "3", "--even").payload["dimension"] == 1
    checks = run("clifford", "gamma", "--check").payload["checks"]
    assert checks["anticommutation"] and checks["grade_dimensions"] == [1, 4, 6, 4, 1]
    assert run("clifford", "spinors", "--p", "1", "--q", "3").payload["types"] == ["Dirac", "Weyl"]
    assert run("clifford", "cpt").payload["operators"]["T"]["square"] == "-1"


def test_seeded_commands_are_deterministic():
    a = dispatch(["renorm", "check", "--seed", "7"]).render()
    b = dispatch(["renorm", "check", "--seed", "7"]).render()
    assert a == b
    assert all(json.loads(a)["payload"]["results"].values())


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "perturbia.cli", "clifford", "classify", "--p", "1", "--q", "3"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["payload"]["label"] == "M2(H)"
