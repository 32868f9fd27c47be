import json
import subprocess
import sys

import numpy as np
import pytest

from fixdiag.cli import main
from fixdiag.pathio import decode_matrix, deserialize, encode_matrix, frame_to_dict
from fixdiag import harmonic_frame


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_csv_literal(capsys):
    code, out, _ = run(["construct-idempotent", "--diag", "0.5,0.25,0.25"], capsys)
    assert code == 0
    q = decode_matrix(json.loads(out)["matrix"])
    assert np.allclose(np.diag(q), [0.5, 0.25, 0.25])


def test_construct_complex_csv(tmp_path, capsys):
    f = tmp_path / "d.csv"
    f.write_text("0.5+0.1j, 0.5-0.1j\n1\n")
    code, out, _ = run(["construct-idempotent", "--diag", str(f)], capsys)
    assert code == 0
    q = decode_matrix(json.loads(out)["matrix"])
    assert np.allclose(np.diag(q), [0.5 + 0.1j, 0.5 - 0.1j, 1])


def test_construct_infeasible_exit_2(capsys):
    code, _, err = run(["construct-idempotent", "--diag", "[0.5, 0.2]"], capsys)
    assert code == 2 and "TraceNotInteger" in err


def test_bad_input_exit_4(capsys):
    assert run(["construct-idempotent", "--diag", "0.5,abc"], capsys)[0] == 4
    assert run(["gamma"], capsys)[0] == 4
    assert run(["m4", "--family", "fournull", "--params", '{"t": [0.3, 0.3]}'], capsys)[0] == 4


def test_gamma(capsys):
    code, out, _ = run(["gamma", "--diag", "0.3,0.4"], capsys)
    assert code == 0 and np.isclose(json.loads(out)["gamma"], 0.3)


def test_connect_and_validate(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    out_path, csv_path = tmp_path / "path.json", tmp_path / "res.csv"
    code, out, _ = run(["m4", "--family", "fournull", "--params", '{"t": [0.3, 0.4]}'], capsys)
    a.write_text(out)
    code, out, _ = run(["m4", "--family", "eightnull", "--params", '{"variant": 1}'], capsys)
    b.write_text(out)
    code, _, _ = run(["connect-projections", "--a", str(a), "--b", str(b), "--samples", "50",
                      "--out", str(out_path), "--csv", str(csv_path)], capsys)
    assert code == 0
    path, _ = deserialize(out_path.read_text())
    assert path.kind == "Projection"
    assert csv_path.read_text().startswith("t,algebraic_residual")
    code, out, _ = run(["validate", "--path", str(out_path), "--step-bound", "0.15"], capsys)
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(["validate", "--path", str(out_path), "--step-bound", "1e-6"], capsys)
    assert code == 3 and not json.loads(out)["passed"]


def test_real_m2_exit_2(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("0.5,0.5\n0.5,0.5\n")
    b.write_text("0.5,-0.5\n-0.5,0.5\n")
    code, _, err = run(["connect-projections", "--a", str(a), "--b", str(b), "--field", "R"], capsys)
    assert code == 2 and "RealM2Disconnected" in err


def test_connect_idempotents(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(encode_matrix(np.diag([1.0, 0.0, 0.0]))))
    b.write_text(json.dumps(encode_matrix(np.array([[1.0, 0, 0], [0.5, 0, 0], [0.5, 0, 0]]))))
    code, out, _ = run(["connect-idempotents", "--a", str(a), "--b", str(b), "--seed", "3",
                        "--samples", "40"], capsys)
    assert code == 0
    path, _ = deserialize(out)
    assert path.kind == "Idempotent" and path.seed == 3


def test_frames(tmp_path, capsys):
    f = tmp_path / "f.json"
    f.write_text(json.dumps(frame_to_dict(harmonic_frame(2, 4))))
    code, out, _ = run(["frame", "verify", "--frame", str(f)], capsys)
    assert code == 0 and json.loads(out)["funtf"]
    code, out, _ = run(["frame", "gram", "--frame", str(f)], capsys)
    p = decode_matrix(json.loads(out)["matrix"])
    assert np.allclose(np.diag(p), 0.5)
    g = tmp_path / "g.json"
    g.write_text(json.dumps(frame_to_dict(harmonic_frame(2, 4, rows=[1, 2]))))
    code, out, _ = run(["frame", "connect", "--a", str(f), "--b", str(g), "--samples", "20"], capsys)
    assert code == 0 and len(json.loads(out)["frames"]) > 2
    assert run(["frame", "connect", "--a", str(f)], capsys)[0] == 4


def test_global_flags_after_subcommand(capsys):
    code, out, _ = run(["gamma", "--diag", "0.5,0.5", "--tol", "1e-6"], capsys)
    assert code == 0


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "fixdiag.cli", "gamma", "--diag", "0.3,0.4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "gamma" in proc.stdout
