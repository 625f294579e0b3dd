import json

import numpy as np
import pytest

from isopara import cli
from isopara import fields as flds
from isopara.profile import ConstantProfile


SPHERE_SPEC = {
    "kind": "cylinder", "k": 3, "C1": 1.0,
    "R0": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "x_star": [0, 0, 0],
    "profile": {"family": "constant", "params": {"a": 1.0}, "C0": 2.0},
}
PLANE_SPEC = {
    "kind": "plane", "q": [0.6, -0.8], "x0": [0, 0],
    "profile": {"family": "constant", "params": {"a": 1.0}, "C0": 0.0},
}


def write_spec(tmp_path, name, spec):
    path = tmp_path / name
    path.write_text(json.dumps(spec))
    return str(path)


def test_classify_sphere_report(tmp_path):
    field = write_spec(tmp_path, "sphere3.json", SPHERE_SPEC)
    report = str(tmp_path / "r.json")
    code = cli.main(["classify", "--field", field, "--at", "2,0,0",
                     "--report", report])
    assert code == 0
    rep = json.loads(open(report).read())
    assert rep["case"] == "cylinder"
    assert rep["params"]["k"] == 3
    assert abs(rep["params"]["C1"] - 1.0) <= 1e-10


def test_invert_moments_with_guess(capsys):
    code = cli.main(["invert-moments", "--C", "1,11", "--d", "1,2",
                     "--guess", "2.5,-0.5"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert np.allclose(out["kappas"], [-1.0, 3.0], atol=1e-9)


def test_verify_flow_plane_exit_zero(tmp_path, capsys):
    field = write_spec(tmp_path, "plane.json", PLANE_SPEC)
    code = cli.main(["verify", "--field", field, "--suite", "flow",
                     "--tol", "1e-8"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"]
    assert all(r["h_law_residual"] <= 1e-8 for r in out["results"])


def test_verify_suites_on_sphere(tmp_path, capsys):
    field = write_spec(tmp_path, "sphere3.json", SPHERE_SPEC)
    for suite in ["hessian-evolution", "harmonic", "isoparametric", "cartan"]:
        code = cli.main(["verify", "--field", field, "--suite", suite])
        assert code == 0, suite
        capsys.readouterr()


def test_profile_ops(tmp_path, capsys):
    spec = str(tmp_path / "prof.json")
    with open(spec, "w") as fh:
        json.dump({"family": "power", "params": {"a": 1.0, "p": 1.0},
                   "C0": 1.0}, fh)
    code = cli.main(["profile", "--spec", spec, "--op", "F", "--at",
                     str(np.e)])
    assert code == 0
    assert abs(float(capsys.readouterr().out) - 1.0) <= 1e-12
    code = cli.main(["profile", "--spec", spec, "--op", "U", "--at", "1.0"])
    assert code == 0
    assert abs(float(capsys.readouterr().out) - np.e) <= 1e-12


def test_synthesize_round_trips_into_classify(tmp_path):
    field = write_spec(tmp_path, "sphere3.json", SPHERE_SPEC)
    out = str(tmp_path / "canon.json")
    csv = str(tmp_path / "pts.csv")
    code = cli.main(["synthesize", "--spec", field, "--out", out,
                     "--samples", "10", "--seed", "1", "--csv", csv])
    assert code == 0
    report = str(tmp_path / "r.json")
    assert cli.main(["classify", "--field", out, "--at", "2,0,0",
                     "--report", report]) == 0
    assert json.loads(open(report).read())["case"] == "cylinder"
    rows = open(csv).read().strip().splitlines()
    assert rows[0].split(",") == ["x1", "x2", "x3", "u", "gradnorm",
                                  "laplacian", "onelap"]
    assert len(rows) == 11


def test_synthesize_deterministic_bytes(tmp_path):
    field = write_spec(tmp_path, "sphere3.json", SPHERE_SPEC)
    outputs = []
    for tag in ("a", "b"):
        out = str(tmp_path / f"canon_{tag}.json")
        csv = str(tmp_path / f"pts_{tag}.csv")
        assert cli.main(["synthesize", "--spec", field, "--out", out,
                         "--samples", "10", "--seed", "7", "--csv", csv]) == 0
        outputs.append(open(out, "rb").read() + open(csv, "rb").read())
    assert outputs[0] == outputs[1]


def test_bad_schema_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["classify", "--field", str(bad), "--at", "1,0"]) == 2
    assert "error:" in capsys.readouterr().err
    good = write_spec(tmp_path, "plane.json", PLANE_SPEC)
    assert cli.main(["classify", "--field", good.replace(".json", "") + "x",
                     "--at", "0,1"]) == 2
    capsys.readouterr()


def test_grid_field_classify(tmp_path):
    fld = flds.make_cylinder(np.eye(3), np.zeros(3), 3, 1.0,
                             ConstantProfile(a=1.0, C0=2.0))
    grid = str(tmp_path / "grid.csv")
    flds.GridField.write(grid, [1.2, -0.9, -0.9], [0.06, 0.06, 0.06],
                         (30, 30, 30), flds.as_callable(fld))
    report = str(tmp_path / "g.json")
    code = cli.main(["classify", "--field", grid, "--at", "2,0,0",
                     "--tol", "1e-3", "--group-tol", "1e-2",
                     "--tol-zero", "1e-5", "--report", report])
    assert code == 0
    rep = json.loads(open(report).read())
    assert rep["case"] == "cylinder"
    assert rep["params"]["k"] == 3
    assert abs(rep["params"]["C1"] - 1.0) <= 1e-2
