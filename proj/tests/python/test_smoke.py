import math

import pytest

import mnarbounds as mb

ALPHA = [[0.2, 0.1], [0.1, 0.3]]
BETA = [0.2, 0.1]


def test_base_bounds_round_trip():
    out = mb.base_bounds(ALPHA, BETA)
    assert out["method"] == "base"
    assert math.isclose(out["lo"], 1.4, abs_tol=1e-12)
    assert math.isclose(out["hi"], 1.7, abs_tol=1e-12)


def test_shadow_bounds_pin_the_point():
    out = mb.shadow_bounds(ALPHA, BETA)
    assert math.isclose(out["lo"], 1.4, abs_tol=1e-9)
    assert math.isclose(out["hi"], 1.4, abs_tol=1e-9)


def test_set_expansion_with_zero_kappa_matches_the_shadow():
    out = mb.set_expansion(ALPHA, BETA, n=1000, C=10.0, kappa_value=0.0)
    assert out["margin"] == 0.0
    assert out["slack"] <= 1e-9
    assert math.isclose(out["lo"], 1.4, abs_tol=1e-7)
    assert math.isclose(out["hi"], 1.4, abs_tol=1e-7)


def test_set_expansion_widens_with_positive_kappa():
    tight = mb.set_expansion(ALPHA, BETA, n=1000, kappa_value=0.0)
    wide = mb.set_expansion(ALPHA, BETA, n=1000, kappa_value=0.5)
    assert wide["lo"] <= tight["lo"] + 1e-12
    assert wide["hi"] >= tight["hi"] - 1e-12
    assert wide["hi"] - wide["lo"] > 1e-3


def test_svd_values_descending():
    s = mb.svd_values([[3.0, 0.0], [0.0, 4.0]])
    assert len(s) == 2
    assert math.isclose(s[0], 4.0, abs_tol=1e-12)
    assert math.isclose(s[1], 3.0, abs_tol=1e-12)


def test_errors_surface_as_bounds_error():
    with pytest.raises(mb.BoundsError):
        mb.base_bounds([[0.5], [0.1, 0.2]], [0.1, 0.1])
    with pytest.raises(mb.BoundsError):
        mb.set_expansion(ALPHA, BETA, n=1000, kappa_rule="bogus")
