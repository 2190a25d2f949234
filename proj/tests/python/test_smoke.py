import json
import math

import pytest

import selfaffine as sa


def test_catalog_and_validation():
    assert "scale4" in sa.catalog()
    assert sa.validate(sa.system("scale4"))["passed"]
    rep = sa.validate(sa.system("triadic"))
    assert not rep["passed"] and not rep["compatibility"]


def test_spectrum_listing():
    pts = sa.enumerate_P(sa.system("scale4"), 3)
    assert [p[0] for p in pts] == ["0", "1", "4", "5", "16", "17", "20", "21"]


def test_fourier_against_closed_form():
    s = sa.system("scale2")
    for t in (-3.7, 0.25, 6.1):
        value, depth, tail = sa.mu_hat(s, [t])
        assert abs(value - sa.mu2_closed_form(t)) < 1e-8
        assert tail < 1e-10


def test_gram_and_q1():
    s = sa.system("scale4")
    off, i, j = sa.gram_max_off_diagonal(s, sa.enumerate_P(s, 4))
    assert off < 1e-7
    total, inc = sa.q1(s, [-1 / 3], 12)
    assert total > 0.98


def test_constants():
    assert sa.gamma_1d(4) == pytest.approx(0.25 + math.pi * math.sqrt(3) / 16, abs=1e-12)
    assert sa.gamma_eiffel(3) == pytest.approx((1 + 3 * math.pi / 16) / 3, abs=1e-12)
    assert sa.lebesgue_Q(-0.5) == pytest.approx(0.5, abs=1e-12)
    c = sa.contractivity(sa.system("eiffel(3)"))
    assert c["beta"] == pytest.approx(math.pi * math.sqrt(2), abs=1e-9)


def test_geometry():
    h = sa.hull(sa.system("eiffel(3)"))
    assert h["volume"] == "1/24"
    assert len(sa.attractor_points(sa.system("scale2"), "sigma", 3)) == 8


def test_system_json_roundtrip():
    s = sa.system("planar-collapse")
    back = sa.system_from_json(s.to_json())
    assert back.L == s.L
    with pytest.raises(Exception):
        sa.system_from_json('{"dim": 1, "R": [["4"]], "B": [["0"], [0.5]], "L": [["0"], ["1"]]}')


def test_cli_roundtrip():
    code, out, err = sa.run_cli(["gamma", "--system", "eiffel", "--r", "3"])
    assert code == 0
    assert json.loads(out)["gamma_eiffel"] == pytest.approx(0.5297, abs=1e-4)
    code, out, err = sa.run_cli(["validate", "--system", "triadic"])
    assert code == 1
