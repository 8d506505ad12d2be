import json
import subprocess
import sys

import numpy as np
import pytest

from cnumrange.cli import EXIT_INPUT, EXIT_OK, EXIT_UNCERTIFIED, JobSpec, main
from cnumrange.matcore import matrix_to_json


def write_matrix(path, A):
    path.write_text(json.dumps(matrix_to_json(np.asarray(A, complex))))
    return str(path)


def write_tuple(path, mats):
    path.write_text(json.dumps({"entries": [matrix_to_json(np.asarray(M, complex)) for M in mats]}))
    return str(path)


@pytest.fixture
def files(tmp_path):
    d = {
        "E2": write_matrix(tmp_path / "E2.json", np.diag([1.0, 0])),
        "E3": write_matrix(tmp_path / "E3.json", np.diag([1.0, 0, 0])),
        "A": write_matrix(tmp_path / "A.json", np.diag([1 + 1j, 1 - 1j])),
        "mA": write_matrix(tmp_path / "mA.json", np.diag([-1 - 1j, -1 + 1j])),
        "H": write_matrix(tmp_path / "H.json", [[2, 1j], [-1j, -1]]),
        "N": write_matrix(tmp_path / "N.json", [[1, 2], [0, 1j]]),
        "pauli": write_tuple(tmp_path / "pauli.json", [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], np.diag([1, -1])]),
    }
    d["dir"] = tmp_path
    return d


def run_cli(args, capsys):
    code = main(args)
    cap = capsys.readouterr()
    summary = json.loads(cap.out) if cap.out.strip() else None
    return code, summary, cap.err


def test_literal_matrix_file(tmp_path, capsys):
    # the documented on-disk layout, written by hand
    (tmp_path / "C.json").write_text('{"n": 2,\n "re": [[1, 0], [0, 0]],\n "im": [[0, 0], [0, 0]]}\n')
    (tmp_path / "A.json").write_text('{"n": 2, "re": [[2, 0], [0, 1]], "im": [[0, 0], [0, 0]]}')
    code, s, _ = run_cli(["range", "--c", str(tmp_path / "C.json"), "--a", str(tmp_path / "A.json"),
                          "--samples", "500", "--out", str(tmp_path / "r")], capsys)
    assert code == EXIT_OK
    assert s["count"] == 500 and s["class"] == "Segment"


def test_range_outputs(files, capsys):
    out = str(files["dir"] / "run" / "x")
    code, s, _ = run_cli(["range", "--c", files["H"], "--a", files["N"], "--samples", "300",
                          "--out", out, "--format", "csv,json,svg"], capsys)
    assert code == EXIT_OK
    names = sorted(p.rsplit("_", 1)[-1] for p in s["outputs"])
    assert names == ["boundary.csv", "cloud.csv", "region.svg"]
    lines = open(out + "_cloud.csv").read().splitlines()
    assert lines[0] == "re,im" and len(lines) == 301
    assert "np." not in "".join(lines)


def test_range_csv_reproducible(files, capsys):
    texts = []
    for k in range(2):
        out = str(files["dir"] / f"rep{k}")
        assert run_cli(["range", "--c", files["H"], "--a", files["N"], "--samples", "200", "--seed", "5",
                        "--out", out, "--format", "csv"], capsys)[0] == EXIT_OK
        texts.append(open(out + "_cloud.csv", "rb").read())
    assert texts[0] == texts[1]


def test_family_polygon(files, capsys):
    out = str(files["dir"] / "fam")
    code, s, _ = run_cli(["family", "--c", files["E2"], "--a", files["A"], "--a", files["mA"], "--grid", "50",
                          "--angles", "180", "--kernel", "21", "--out", out, "--format", "json,svg"], capsys)
    assert code == EXIT_OK
    assert s["slices"] == 51 and s["convex_slices"] and s["convex"] is False
    assert s["convexity_witness"] is not None and s["kernel_points"] >= 1
    region = json.load(open(out + "_region.json"))
    assert "parts" in region


def test_family_cloud_reproducible(files, capsys):
    texts = []
    for k in range(2):
        out = str(files["dir"] / f"fc{k}")
        code, s, _ = run_cli(["family", "--c", files["N"], "--a", files["A"], "--a", files["H"], "--grid", "3",
                              "--samples", "100", "--seed", "2", "--out", out, "--format", "csv"], capsys)
        assert code == EXIT_OK and not s["convex_slices"]
        texts.append(open(out + "_cloud.csv", "rb").read())
    assert texts[0] == texts[1]
    assert texts[0].count(b"\n") == 401 and b"np." not in texts[0]


def test_joint_single(files, capsys):
    out = str(files["dir"] / "j")
    code, s, _ = run_cli(["joint", "--c", files["E2"], "--a", files["pauli"], "--samples", "100",
                          "--out", out, "--format", "csv"], capsys)
    assert code == EXIT_OK and s["real"] and s["flat_dimension"] == 3
    rows = np.loadtxt(out + "_cloud.csv", delimiter=",", skiprows=1)
    assert rows.shape == (100, 6)
    re = rows[:, 0::2]
    assert np.allclose((re ** 2).sum(1), 1, atol=1e-9)


def test_joint_exact_slices(files, capsys):
    d = files["dir"]
    a0 = write_tuple(d / "a0.json", [np.diag([0, 0, 1]), np.diag([1, 0, 1]), np.diag([0, 0, 1])])
    a1 = write_tuple(d / "a1.json", [np.diag([1, 1, 0]), np.diag([0, 1, 0]), np.diag([0, 1, 0])])
    out = str(d / "js")
    code, s, _ = run_cli(["joint", "--c", files["E3"], "--a", a0, "--a", a1, "--grid", "10", "--out", out], capsys)
    assert code == EXIT_OK and s == {**s, "slices": 11, "exact": True}
    slices = json.load(open(out + "_slices.json"))
    assert len(slices) == 11


def test_certify_single_default_center(files, capsys):
    code, s, _ = run_cli(["certify", "--c", files["E2"], "--a", files["N"], "--out", str(files["dir"] / "c")],
                         capsys)
    assert code == EXIT_OK and s["verdict"] == "certified"


def test_certify_family(files, capsys):
    base = ["certify", "--c", files["E2"], "--a", files["A"], "--a", files["mA"], "--grid", "50",
            "--angles", "180", "--out", str(files["dir"] / "cf")]
    code, s, _ = run_cli(base + ["--mu", "0,0"], capsys)
    assert code == EXIT_OK and s["verdict"] == "certified"
    code, s, _ = run_cli(base + ["--mu", "0.5,0"], capsys)
    assert code == EXIT_UNCERTIFIED and s["verdict"] == "not certified"
    assert "first_violation" in s
    code, _, err = run_cli(base, capsys)
    assert code == EXIT_INPUT and "--mu" in err


def test_certify_needs_hermitian_c(files, capsys):
    code, _, err = run_cli(["certify", "--c", files["N"], "--a", files["A"]], capsys)
    assert code == EXIT_INPUT and err.startswith(f"error: {files['N']}:1:")


def test_repro_subcommand(files, capsys):
    out = str(files["dir"] / "p")
    code, s, _ = run_cli(["repro", "pauli", "--out", out, "--format", "csv,json"], capsys)
    assert code == EXIT_OK and s["verdict"] == "certified"
    assert all(c["passed"] for c in s["checks"])
    code, _, err = run_cli(["repro", "nope"], capsys)
    assert code == EXIT_INPUT and "unknown fixture" in err


def test_malformed_json_line_anchored(files, capsys):
    bad = files["dir"] / "bad.json"
    bad.write_text('{"n": 2,\n "re": [[1, 0], [0, 1]],\n "im": [[0, 0] [0, 0]]}')
    code, _, err = run_cli(["range", "--c", str(bad), "--a", files["A"]], capsys)
    assert code == EXIT_INPUT
    assert err.startswith(f"error: {bad}:3:")


def test_bad_inputs_exit_one(files, capsys):
    missing = str(files["dir"] / "missing.json")
    assert run_cli(["range", "--c", missing, "--a", files["A"]], capsys)[0] == EXIT_INPUT
    assert run_cli(["range", "--c", files["E3"], "--a", files["A"]], capsys)[0] == EXIT_INPUT
    assert run_cli(["range", "--a", files["A"]], capsys)[0] == EXIT_INPUT
    assert run_cli(["range", "--c", files["E2"], "--a", files["A"], "--samples", "0"], capsys)[0] == EXIT_INPUT
    assert run_cli(["range", "--c", files["E2"], "--a", files["A"], "--format", "png"], capsys)[0] == EXIT_INPUT
    assert run_cli(["certify", "--c", files["E2"], "--a", files["A"], "--mu", "x"], capsys)[0] == EXIT_INPUT
    code, _, err = run_cli(["joint", "--c", files["E3"], "--a", files["pauli"]], capsys)
    assert code == EXIT_INPUT and "does not match" in err


def test_manifest_input(files, capsys):
    from cnumrange.family import family_manifest

    man = files["dir"] / "man.json"
    man.write_text(json.dumps(family_manifest(np.diag([1.0, 0]), [np.diag([1 + 1j, 1 - 1j]), np.diag([-1 - 1j, -1 + 1j])],
                                              grid=20, angles=90)))
    code, s, _ = run_cli(["family", "--manifest", str(man), "--out", str(files["dir"] / "m")], capsys)
    assert code == EXIT_OK and s["slices"] == 21


def test_jobspec_roundtrip():
    spec = JobSpec("family", c="C.json", a=["A.json", "B.json"], grid=10, seed=4, tol=1e-8,
                   output="out/x", formats=["csv", "svg"], mu=[0.5, -1.0], kernel=20)
    assert JobSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ValueError):
        JobSpec("range", samples=0)
    with pytest.raises(ValueError):
        JobSpec("range", tol=0.0)
    with pytest.raises(ValueError):
        JobSpec("range", output="")
    with pytest.raises(ValueError):
        JobSpec("plot")


def test_console_entry_point(files, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cnumrange.cli", "range", "--c", files["E2"], "--a", files["A"],
                           "--samples", "10", "--out", str(tmp_path / "e")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == 10
