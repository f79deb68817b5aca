import json

import pytest

from polyaut.cli import build_parser, main
from polyaut.lattice import FaceLattice, validate


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_v4_force_general(tmp_path, capsys):
    lat_path, rep_path = tmp_path / "p.json", tmp_path / "r.json"
    code, _, _ = run(["construct", "builtin:V4", "--force-general", "--jobs", "1",
                      "--out", str(lat_path), "--report", str(rep_path)], capsys)
    assert code == 0
    report = json.loads(rep_path.read_text())
    assert report["branch"] == "general"
    assert report["verification"]["aut_order"] == 4
    assert report["config"]["flags"]["force_general"] is True
    lat = FaceLattice.from_json(lat_path.read_text())
    assert validate(lat).ok
    code, out, _ = run(["aut", str(lat_path), "--jobs", "1"], capsys)
    assert code == 0 and json.loads(out)["aut_order"] == 4


def test_construct_cyclic_from_file(tmp_path, capsys):
    g = tmp_path / "c7.json"
    g.write_text(json.dumps({"degree": 7, "generators": ["(1 2 3 4 5 6 7)"]}))
    code, out, _ = run(["construct", str(g)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["branch"] == "wheel" and rep["verification"]["aut_order"] == 7


def test_construct_from_cayley_table(tmp_path, capsys):
    g = tmp_path / "z3.json"
    g.write_text(json.dumps({"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}))
    code, out, _ = run(["construct", str(g)], capsys)
    assert code == 0 and json.loads(out)["verification"]["aut_order"] == 3


def test_malformed_cycle_exit_2(tmp_path, capsys):
    g = tmp_path / "bad.json"
    g.write_text(json.dumps({"degree": 4, "generators": ["(1 2)(3 x)"]}))
    code, _, err = run(["construct", str(g)], capsys)
    assert code == 2
    assert "'x'" in err and "position" in err


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, err = run(["validate", str(tmp_path / "nope.json")], capsys)
    assert code == 2 and "cannot read" in err


def test_resource_cap_exit_4(capsys):
    code, _, _ = run(["construct", "builtin:V4", "--force-general", "--max-faces", "100"], capsys)
    assert code == 4


def test_aut_cap_exit_4(capsys):
    code, _, _ = run(["aut", "builtin:cube", "--max-flags", "10"], capsys)
    assert code == 4


def test_aut_builtin_cube(capsys):
    code, out, _ = run(["aut", "builtin:cube", "--elements", "--jobs", "1"], capsys)
    js = json.loads(out)
    assert code == 0 and js["aut_order"] == 48 and len(js["elements"]) == 48


def test_bsd_cube(capsys):
    code, out, _ = run(["bsd", "builtin:cube"], capsys)
    js = json.loads(out)
    assert code == 0
    assert js["counts"] == {"vertices": 26, "chambers": 48}


def test_realize_cube(tmp_path, capsys):
    off, cert = tmp_path / "cube.off", tmp_path / "cert.json"
    code, _, _ = run(["realize", "builtin:cube", "--out", str(off), "--report", str(cert)], capsys)
    assert code == 0
    head = off.read_text().splitlines()[:2]
    assert head == ["OFF", "26 48 0"]
    c = json.loads(cert.read_text())
    assert c["isomorphic"] is True and len(c["map"]) == 1 + 26 + 72 + 48 + 1
    side = json.loads((tmp_path / "cube.off.json").read_text())
    assert len(side["points"]) == 26


def test_realize_4_simplex_writes_json_only(tmp_path, capsys):
    out = tmp_path / "s4.json"
    code, rep, _ = run(["realize", "builtin:4-simplex", "--out", str(out)], capsys)
    assert code == 0
    assert json.loads(rep)["counts"]["facets"] == 120
    assert len(json.loads(out.read_text())["facets"]) == 120


def test_realize_points_file(tmp_path, capsys):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps({"dim_ambient": 2, "points": [["0", "0"], ["3", "0"], ["0", "1/2"]]}))
    code, out, _ = run(["realize", str(pts)], capsys)
    assert code == 0 and json.loads(out)["counts"]["vertices"] == 6


def test_validate_reports_failures(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    lat = {"rank": 2, "faces": [{"id": 0, "rank": -1, "covers": []},
                                {"id": 1, "rank": 0, "covers": [0]},
                                {"id": 2, "rank": 1, "covers": [1]},
                                {"id": 3, "rank": 2, "covers": [2]}]}
    bad.write_text(json.dumps(lat))
    code, out, _ = run(["validate", str(bad)], capsys)
    assert code == 2
    assert any(not c["pass"] for c in json.loads(out)["checks"])


def test_unknown_builtin(capsys):
    code, _, err = run(["aut", "builtin:dodecahedron"], capsys)
    assert code == 2 and "unknown built-in" in err


def test_parser_lists_all_commands():
    p = build_parser()
    for cmd in ("construct", "aut", "bsd", "realize", "validate"):
        assert p.parse_args([cmd, "x"]).command == cmd
    with pytest.raises(SystemExit):
        p.parse_args(["frobnicate"])
