import json
import math

import pytest

import islab


def test_anosov_exponent():
    sigma = math.log(9 + 4 * math.sqrt(5))
    assert islab.anosov_sigma() == pytest.approx(sigma, abs=1e-14)
    assert islab.max_lyapunov("anosov", (0.1234, 0.5678), 50) == pytest.approx(sigma, abs=1e-6)


def test_island_map_symmetry_and_inverse():
    f = islab.IslandMap(delta=0.15)
    p = (0.31, 0.17)
    q = f(p)
    r = f((1 - p[0], 1 - p[1]))
    assert math.remainder(q[0] + r[0], 1.0) == pytest.approx(0.0, abs=1e-9)
    assert math.remainder(q[1] + r[1], 1.0) == pytest.approx(0.0, abs=1e-9)
    back = f.inverse(q)
    assert math.remainder(back[0] - p[0], 1.0) == pytest.approx(0.0, abs=1e-9)
    assert f.in_hole(f.centers()[0])
    assert islab.symplectic_defect("island", p) < 1e-8


def test_island_saddles():
    f = islab.IslandMap()
    saddles = f.saddles(0)
    assert len(saddles) == 4
    lu = math.exp(2 * islab.anosov_sigma())
    for s in saddles:
        assert s["lambda_u"] / lu == pytest.approx(1.0, rel=1e-4)


def test_cone_certificate():
    assert islab.cone_certificate("anosov", (0.2, 0.7), 20) == (True, -1)
    holds, step = islab.cone_certificate("rotation", (0.2, 0.7), 20)
    assert not holds and step == 1


def test_rescaling_error():
    assert islab.rescaling_error("affine", 8) < 1e-9
    assert islab.rescaling_error("nonlinear", 14) < islab.rescaling_error("nonlinear", 10)


def test_validate_config():
    assert islab.validate_config("suite = rescaling\n") == []
    problems = islab.validate_config("suite = rescaling\nrescaling.bogus = 1\n")
    assert problems and any("bogus" in p for p in problems)


def test_run_suite_writes_artifacts(tmp_path):
    text = "suite = rescaling\nrescaling.k_list = 8, 10\nrescaling.psi_sets = 1\nrescaling.corollary_points = 20\n"
    report = islab.run_suite(text, str(tmp_path), seed=7, threads=1)
    assert report["suite"] == "rescaling"
    assert report["passed"] is True
    assert (tmp_path / "e_of_k.csv").exists()
    on_disk = json.loads((tmp_path / "report.json").read_text())
    assert on_disk == report
    with pytest.raises(ValueError):
        islab.run_suite("suite = nope\n", str(tmp_path))
