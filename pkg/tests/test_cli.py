"""Command-line surface: outputs, exit codes, determinism."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hyptet import covolume, extended_angles, volume_from_angles
from hyptet.cli import main

PI = math.pi


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_plain_output(capsys):
    code, out, err = run_cli(["tetra", "classify", "--l", "1,1,1,2,2,2"], capsys)
    assert code == 0
    assert out.strip() == "InteriorL"


def test_lengths_to_angles_matches_library(capsys):
    s = math.log(math.sqrt(2.0) / 2.0)
    arg = f"0,0,0,{s!r},{s!r},{s!r}"
    code, out, _ = run_cli(["tetra", "lengths-to-angles", "--l", arg], capsys)
    assert code == 0
    alpha = json.loads(out)["alpha"]
    assert alpha[0] == pytest.approx(PI / 4, abs=1e-8)
    lib = extended_angles([0, 0, 0, s, s, s])
    assert alpha == list(lib)


def test_angles_to_lengths_and_degrees(capsys):
    code, out, _ = run_cli(
        ["tetra", "angles-to-lengths", "--alpha", "45,45,45,67.5,67.5,67.5",
         "--degrees"],
        capsys,
    )
    assert code == 0
    l = json.loads(out)["l"]
    assert l[3] == pytest.approx(math.log(math.sqrt(2) / 2), abs=1e-12)


def test_volume_and_covolume_match_library(capsys):
    alpha = [PI / 4] * 3 + [3 * PI / 8] * 3
    arg = ",".join(repr(a) for a in alpha)
    code, out, _ = run_cli(["tetra", "volume", "--alpha", arg], capsys)
    assert code == 0
    assert json.loads(out)["volume"] == volume_from_angles(alpha)

    larg = "0,0,0,0,0,10"
    code, out, _ = run_cli(["tetra", "covolume", "--l", larg], capsys)
    assert json.loads(out)["covolume"] == covolume([0, 0, 0, 0, 0, 10])


def test_fixture_validate_gap_pipeline(tmp_path, capsys):
    out_dir = str(tmp_path / "fx")
    code, out, _ = run_cli(
        ["fixture", "double", "--l", "0,0,0,0,0,0", "--out-dir", out_dir], capsys
    )
    assert code == 0
    paths = json.loads(out)

    code, out, _ = run_cli(["validate", paths["tri"]], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["edge_classes"] == 6
    assert summary["vertex_classes"] == 4
    assert summary["edge_slots"] == 12

    code, out, _ = run_cli(["gap", paths["tri"], "--k", paths["k"]], capsys)
    assert code == 0
    gap = json.loads(out)
    assert abs(gap["gap"]) <= 1e-6 * (1 + abs(2 * gap["volume"]))


def test_maximize_solve_rigidity_reports(tmp_path, capsys):
    out_dir = str(tmp_path / "fx2")
    run_cli(["fixture", "double", "--l", "0.2,-0.1,0,0.3,0.1,-0.2",
             "--out-dir", out_dir], capsys)
    tri = f"{out_dir}/tri.json"
    kp = f"{out_dir}/k.json"

    code, out, _ = run_cli(["maximize", tri, "--k", kp], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["kkt_residual"] <= 1e-8
    expected = json.load(open(f"{out_dir}/assignment.json"))
    got = np.array(rep["maximizer"]["values"])
    assert np.max(np.abs(got - np.array(expected["values"]))) <= 1e-6

    code, out, _ = run_cli(["solve", tri, "--k", kp], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["residual"] <= 1e-8
    assert rep["diverged"] is False

    code, out, _ = run_cli(["rigidity", tri, "--k", kp, "--starts", "3"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["all_agree"] is True


def test_byte_identical_reruns(tmp_path, capsys):
    out_dir = str(tmp_path / "fx3")
    run_cli(["fixture", "double", "--l", "0,0,0,0,0,0", "--out-dir", out_dir],
            capsys)
    tri = f"{out_dir}/tri.json"
    kp = f"{out_dir}/k.json"
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(
            ["rigidity", tri, "--k", kp, "--starts", "3", "--seed", "7"], capsys
        )
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_seventeen_digit_floats(capsys):
    code, out, _ = run_cli(
        ["tetra", "volume", "--alpha",
         "0.8,0.7,0.6,1.1207963267948966,1.2207963267948966,1.3207963267948966"],
        capsys,
    )
    assert code == 0
    text = out.split(":")[1].rstrip("}\n")
    assert float(text) == json.loads(out)["volume"]


def test_error_object_and_exit_codes(capsys, tmp_path):
    code, out, err = run_cli(["tetra", "volume", "--alpha", "1,1,1,1,1,1"], capsys)
    assert code == 1
    payload = json.loads(err)
    assert payload["error"] == "InvalidAngles"

    code, _, err = run_cli(["tetra", "classify", "--l", "1,2"], capsys)
    assert code == 2

    code, _, err = run_cli(["validate", str(tmp_path / "missing.json")], capsys)
    assert code == 1
    assert json.loads(err)["error"] == "FileNotFoundError"


def test_usage_error_exit_code_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "hyptet.cli", "nonsense-verb"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2


def test_selftest_runs_quickly(capsys):
    code, out, _ = run_cli(["selftest"], capsys)
    assert code == 0
    assert "6/6 suites passed" in out
