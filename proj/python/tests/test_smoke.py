import json
import math
import os
import pathlib

import pytest

import yamabe

CONFIGS = pathlib.Path(
    os.environ.get("YAMABE_CONFIG_DIR", pathlib.Path(__file__).resolve().parents[2] / "configs")
)


def load(name):
    return json.loads((CONFIGS / name).read_text())


def test_cone_values():
    assert yamabe.mu_plus(5, 2) == pytest.approx(1.5, abs=1e-12)
    assert yamabe.contains([1.0, 0.0, 0.0, 0.0], 2) == "boundary"
    assert yamabe.contains([1.0, 1.0, 1.0, 1.0], 2) == "interior"
    # normalized so that f(e/2) = 1
    assert yamabe.f_eval([0.5] * 5, 2) == pytest.approx(1.0, rel=1e-14)
    assert yamabe.f_eval([0.5] * 5, 2, normalize=False) == pytest.approx(math.sqrt(2.5))


def test_tau_cone():
    assert yamabe.mu_plus(4, 2, tau=[0.9]) > 1.0


def test_solve_manufactured():
    out = yamabe.solve(load("hyperbolic_ball.json"))
    assert out["converged"]
    assert out["sup_error"] < 5e-5
    assert len(out["r"]) == len(out["u"])


def test_exhaust_classifies():
    rep = yamabe.exhaust(load("euclidean_exhaust.json"))
    assert rep["classification"] == "case2_boundary_limit"
    assert rep["audits"]["barrier_ok"]


def test_validation_errors():
    cfg = load("hyperbolic_ball.json")
    cfg["problem"]["nodes"] = 3
    with pytest.raises(ValueError):
        yamabe.validate(cfg)
    with pytest.raises(ValueError):
        yamabe.validate({"bogus": 1})


def test_verify_cones():
    results = yamabe.verify("cones")
    assert results and all(r["pass"] for r in results)
