"""Catalog lookups for constant invariants and their round trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gacurves.classify import (
    TABLE_A1,
    classify_plane_constant,
    classify_projective_constant,
    classify_space_constant,
    log_spiral_curvature,
    power_curvature,
    projective_coefficients,
)
from gacurves.classify import CV_DEFAULTS, CV_HOMOGENEOUS, constant_space_invariants, homogeneous_ode
from gacurves.errors import ClassificationError, UsageError
from gacurves.plane import plane_invariants_at
from gacurves.space import space_invariants_at

SQRT2 = math.sqrt(2.0)


@pytest.mark.parametrize("k,eps,family", [
    (-4.0, 1, "tlogt"),
    (-SQRT2, -1, "exp-graph"),
    (0.0, 1, "ellipse-graph"),
    (0.0, -1, "hyperbola-graph"),
    (-2.0, 1, "log-spiral"),
    (-5.0, 1, "power"),
    (-3.0, -1, "power"),
    (-1.0, -1, "power"),
])
def test_plane_families(k, eps, family):
    c = classify_plane_constant(k, eps)
    assert c.family == family
    # the representative reproduces the classified invariants
    lo, hi = c.representative.interval
    r = plane_invariants_at(c.representative, lo + 0.37 * (hi - lo))
    assert r.eps == eps
    assert r.k == pytest.approx(k, abs=1e-6)


def test_plane_aliases_and_parameters():
    assert classify_plane_constant(0.0, 1).names() == {"ellipse-graph", "ellipse"}
    c = classify_plane_constant(-2.0, 1)
    assert log_spiral_curvature(c.parameters["gamma"]) == pytest.approx(-2.0, rel=1e-12)
    assert c.parameters["gamma"] == pytest.approx(math.sqrt(3.0), rel=1e-12)
    for k, eps, lo, hi in ((-5.0, 1, 0.5, 1.0), (-3.0, -1, 0.0, 0.5), (-1.0, -1, -1.0, 0.0)):
        alpha = classify_plane_constant(k, eps).parameters["alpha"]
        assert lo < alpha < hi
        assert power_curvature(alpha) == pytest.approx(k, rel=1e-12)


def test_positive_k_is_reversed():
    c = classify_plane_constant(2.0, 1)
    assert c.warnings and c.family == "log-spiral"
    lo, hi = c.representative.interval
    assert plane_invariants_at(c.representative, 0.5 * (lo + hi)).k == pytest.approx(2.0, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20.0).filter(lambda a: abs(a - 0.5) > 1e-3 and abs(a - 2.0) > 1e-3 and abs(a - 1) > 1e-3))
def test_power_curvature_inversion_symmetry(alpha):
    # (t, t^alpha) and (t, t^(1/alpha)) differ by swapping the axes
    assert power_curvature(1.0 / alpha) == pytest.approx(power_curvature(alpha), rel=1e-12)


def test_plane_errors():
    with pytest.raises(UsageError):
        classify_plane_constant(-1.0, 0)
    with pytest.raises(UsageError):
        classify_plane_constant(float("nan"), 1)


@pytest.mark.parametrize("k,M,eps,family", [
    (0.0, 0.0, 1, "circular-helix"),
    (0.0, 0.0, -1, "hyperbolic-helix"),
    (-SQRT2, SQRT2, -1, "mk"),
])
def test_space_families(k, M, eps, family):
    assert classify_space_constant(k, M, eps).family == family


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.sampled_from([1, -1]))
def test_space_classify_then_compute(k, M, eps):
    try:
        c = classify_space_constant(k, M, eps)
    except ClassificationError:
        return
    r = space_invariants_at(c.representative, 0.2)
    assert r.eps == eps
    assert r.k == pytest.approx(k, abs=1e-6)
    assert r.M == pytest.approx(M, abs=1e-6)


def test_constant_space_invariants_roundtrip():
    for k, M, eps in ((0.3, -0.7, 1), (-0.2, 0.5, -1)):
        a, b, c = -3 * k, -eps - 11 * (3 * k) ** 2 / 36, -M + eps * (-3 * k) / 6 + (-3 * k) ** 3 / 36
        assert constant_space_invariants(a, b, c) == pytest.approx((eps, k, M), abs=1e-12)
    with pytest.raises(ClassificationError):
        constant_space_invariants(0.0, 0.0, 0.0)


@pytest.mark.parametrize("family", sorted(TABLE_A1))
def test_projective_roundtrip(family):
    params = CV_DEFAULTS[family]
    abc = projective_coefficients(family, **params)
    c = classify_projective_constant(*abc)
    assert c.family == family
    assert c.parameters["coefficient_residual"] < 1e-9
    again = projective_coefficients(family, **{k: v for k, v in c.parameters.items() if k in params})
    np.testing.assert_allclose(again, abc, atol=1e-9)


@pytest.mark.parametrize("family", sorted(TABLE_A1))
def test_projective_table_matches_coordinates(family):
    d, a, b, c = homogeneous_ode(CV_HOMOGENEOUS[family], CV_DEFAULTS[family])
    assert d == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose([a, b, c], projective_coefficients(family, **CV_DEFAULTS[family]), atol=1e-9)


def test_projective_examples():
    c = classify_projective_constant(6.0, -8.0, 3.0)
    assert c.family == "CV8" and c.parameters["lam"] == pytest.approx(1.0, rel=1e-12)
    assert classify_projective_constant(0.0, 0.0, 0.0).family == "CV9"
    assert classify_projective_constant(2.0, 0.0, -1.0).family == "CV6"


def test_borderline_multiplicity_reports_both_candidates():
    c = classify_projective_constant(2.0, 1e-12, -1.0)
    assert c.family == "CV6"
    assert c.candidates == ["CV6", "CV3"]
    assert any("borderline" in w for w in c.warnings)
    # a clear separation is not borderline
    c = classify_projective_constant(2.0, 1e-3, -1.0)
    assert len(c.candidates) == 1 and not c.warnings


def test_projective_errors():
    with pytest.raises(UsageError):
        classify_projective_constant(float("inf"), 0.0, 0.0)
    with pytest.raises(UsageError):
        projective_coefficients("CV10")
