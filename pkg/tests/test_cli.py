import csv
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catenoid_ends.balance import Configuration, legendre_config, sqrt13_config
from catenoid_ends.cli import main
from catenoid_ends.configio import ConfigFileError, dumps_config, loads_config, read_config, write_config
from catenoid_ends.polynomials import root_set_distance


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_roots_n1(tmp_path, capsys):
    out = tmp_path / "r1.json"
    code, stdout, _ = run(["roots", "--n", 1, "--out", out], capsys)
    assert code == 0
    assert "max|F_k|" in stdout
    d = json.loads(out.read_text())
    assert d["points"] == [[-1.0, 0.0], [1.0, 0.0]]
    assert d["alphas"] == [1.0, -1.0]


def test_roots_n2(tmp_path, capsys):
    out = tmp_path / "r2.json"
    assert run(["roots", "--n", 2, "--out", out], capsys)[0] == 0
    c = read_config(out)
    assert root_set_distance(c.points[:2], [-2 + np.sqrt(3), -2 - np.sqrt(3)]) <= 1e-14


def test_roots_out_of_range(capsys):
    code, _, err = run(["roots", "--n", 26], capsys)
    assert code == 2
    assert "25" in err


def test_roots_to_stdout(capsys):
    code, stdout, err = run(["roots", "--n", 3], capsys)
    assert code == 0
    assert loads_config(stdout).m == 4
    assert "max|F_k|" in err


def test_verify_sqrt13(tmp_path, capsys):
    path = tmp_path / "s13.json"
    write_config(sqrt13_config(), path)
    csv_path = tmp_path / "s13.csv"
    code, stdout, _ = run(["verify", path, "--csv", csv_path], capsys)
    assert code == 0
    assert "PASS" in stdout
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["k", "re_p", "im_p", "alpha", "abs_F", "period_x1", "period_x2", "period_x3"]
    assert len(rows) == 1 + 3 + 1
    assert all(float(r[4]) <= 1e-12 for r in rows[1:4])
    assert rows[-1][0] == "origin"
    assert float(rows[-1][6]) == pytest.approx(-np.pi, abs=1e-8)


def test_verify_perturbed(tmp_path, capsys):
    c = legendre_config(3)
    p = c.points.copy()
    p[0] *= 1.05
    path = tmp_path / "bad.json"
    write_config(Configuration(p, c.alphas), path)
    code, stdout, _ = run(["verify", path], capsys)
    assert code == 1
    assert "FAIL" in stdout


def test_verify_parse_failure(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"alphas": [1, -1],\n "points": [[1, 0], [2, 0]\n')
    code, _, err = run(["verify", path], capsys)
    assert code == 2
    assert "line 3" in err


@pytest.mark.parametrize(
    "text, field",
    [
        ('{"alphas": [1, -1]}', "points"),
        ('{"alphas": [1, -1], "points": [[1, 0]]}', "alphas"),
        ('{"alphas": [1, "x"], "points": [[1, 0], [2, 0]]}', "alphas[1]"),
        ('{"alphas": [1, -1], "points": [[1, 0], [2]]}', "points[1]"),
        ('{"alphas": [1, -1], "points": [[1, 0], [1, 0]]}', "coincide"),
    ],
)
def test_config_field_diagnostics(text, field):
    with pytest.raises(ConfigFileError, match=field.replace("[", r"\[").replace("]", r"\]")):
        loads_config(text)


def test_roots_piped_into_verify():
    exe = [sys.executable, "-m", "catenoid_ends"]
    roots = subprocess.run(exe + ["roots", "--n", "5"], capture_output=True, check=True)
    ver = subprocess.run(exe + ["verify", "-"], input=roots.stdout, capture_output=True)
    assert ver.returncode == 0, ver.stdout.decode() + ver.stderr.decode()


def test_solve_perturbed_f3(tmp_path, capsys):
    c = legendre_config(3)
    p = c.points.copy()
    p[:3] *= [1.04, 0.97, 1.05]
    init = tmp_path / "init.json"
    out = tmp_path / "solved.json"
    write_config(Configuration(p, c.alphas), init)
    code, stdout, _ = run(["solve", init, "--fixed", 3, "--out", out], capsys)
    assert code == 0
    assert "iterations" in stdout
    assert root_set_distance(read_config(out).points, c.points) <= 1e-8


def test_solve_already_balanced(tmp_path, capsys):
    init = tmp_path / "b.json"
    write_config(legendre_config(4), init)
    code, stdout, _ = run(["solve", init, "--fixed", 4, "--out", tmp_path / "o.json"], capsys)
    assert code == 0
    assert int(stdout.split("iterations = ")[1].split()[0]) <= 1


def test_solve_sqrt13_from_symmetric(tmp_path, capsys):
    init = tmp_path / "sym.json"
    write_config(Configuration(legendre_config(2).points, [0.25, 0.75, -1]), init)
    out = tmp_path / "s.json"
    assert run(["solve", init, "--fixed", 2, "--out", out], capsys)[0] == 0
    assert root_set_distance(read_config(out).points, sqrt13_config().points) <= 1e-8


def test_solve_failure_writes_partial(tmp_path, capsys):
    init = tmp_path / "far.json"
    write_config(Configuration([-3.0, -0.1, 1.0], [0.5, 0.5, -1]), init)
    out = tmp_path / "x.json"
    code, _, err = run(["solve", init, "--fixed", 2, "--out", out, "--max-iter", 1], capsys)
    assert code == 4
    assert (tmp_path / "x.json.partial").exists()
    assert not out.exists()


def test_mesh_theorem_n2(tmp_path, capsys):
    cfg = tmp_path / "n2.json"
    write_config(legendre_config(2), cfg)
    obj = tmp_path / "n2.obj"
    code, stdout, _ = run(["mesh", cfg, "--out", obj], capsys)
    assert code == 0
    defect = float(stdout.split("period defect = ")[1].split()[0])
    assert defect <= 1e-6
    assert obj.read_bytes().startswith(b"v ")


def test_mesh_unbalanced_needs_force(tmp_path, capsys):
    c = legendre_config(2)
    p = c.points.copy()
    p[0] *= 1.1
    cfg = tmp_path / "u.json"
    write_config(Configuration(p, c.alphas), cfg)
    obj = tmp_path / "u.obj"
    assert run(["mesh", cfg, "--out", obj], capsys)[0] == 1
    assert not obj.exists()
    assert run(["mesh", cfg, "--out", obj, "--force", "--nr", 12, "--ntheta", 24], capsys)[0] == 0
    assert obj.exists()


def test_mesh_sqrt13_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    write_config(sqrt13_config(), cfg)
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    assert run(["mesh", cfg, "--out", a], capsys)[0] == 0
    assert run(["mesh", cfg, "--out", b], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "x.json"])
    assert info.value.code == 2


finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(finite, finite, finite), min_size=1, max_size=8), st.text(max_size=20))
def test_config_round_trip(entries, label):
    pts = [complex(x, y) for x, y, _ in entries]
    alphas = [a for _, _, a in entries]
    try:
        c = Configuration(pts, alphas, label)
    except Exception:
        return
    assert loads_config(dumps_config(c)) == c
