import json
import math
import os

import pytest

import tropmap

DATA = os.environ["TROPMAP_TEST_DATA"]


def doc(name):
    with open(os.path.join(DATA, name)) as f:
        return f.read()


def test_version():
    assert tropmap.version() == "0.1.0"


def test_homology_ranks():
    ranks = tropmap.homology(doc("line_fan.json"), 1)
    assert ranks["(1,1)"] == 1
    assert ranks["(1,0)"] == 0


def test_kgroup():
    k = tropmap.kgroup(doc("line_fan.json"), 1)
    assert k["dim_F0"] == 1
    assert k["J0"] == []


def test_hypersurface_balances():
    cycle = tropmap.trop_hypersurface(doc("quad_poly.json"))
    report = tropmap.check_balanced(json.dumps(cycle))
    assert report["balanced"] is True
    assert report["violating_cone"] is None


def test_weighted_tropicalization():
    out = tropmap.weighted_tropicalization(doc("annulus_chain.json"), doc("line_fan.json"))
    assert out["degree"] == 1
    by_rays = {json.dumps(c["rays"]): c["coeff"] for c in out["cones"]}
    assert by_rays["[[1]]"] == ["1"]
    assert by_rays["[[-1]]"] == ["-1"]


def test_limit_is_eps_independent_on_the_annulus():
    out = tropmap.limit_integral(
        doc("annulus_chain.json"), doc("ray_window_form.json"), levels=4
    )
    assert len(out["levels"]) == 4
    assert abs(out["limit"].imag) < 1e-9
    assert abs(out["limit"].real - out["levels"][0]["value"].real) < 1e-6


def test_circle_period():
    value, error = tropmap.log_integral(doc("circle_chain.json"), "[[1]]")
    assert abs(value - (-1.0)) < 1e-9
    assert error < 1e-6


def test_parabola_directions():
    out = tropmap.log_limit_sample(doc("parabola_set.json"), [60.0, 30.0], 40, 7)
    assert len(out["clusters"]) == 2
    s5 = math.sqrt(5.0)
    for c in out["clusters"]:
        d = c["dir"]
        dist = min(
            math.hypot(d[0] - 1 / s5, d[1] - 2 / s5),
            math.hypot(d[0] + 1 / s5, d[1] + 2 / s5),
        )
        assert dist < 0.05
        assert c["weight"] > 0


def test_exp_cone():
    assert tropmap.in_exp_cone([1e-4, 0.1], [2.0], 0.5)
    assert not tropmap.in_exp_cone([0.1, 0.1], [2.0], 0.5)


def test_invariant_errors_surface():
    with pytest.raises(tropmap.InvariantError):
        tropmap.homology(doc("bad_fan.json"), 1)
    with pytest.raises(tropmap.ParseError):
        tropmap.homology("{not json", 1)
