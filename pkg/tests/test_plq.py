import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import convex_plq, half_integers
from fitzcert.plq import (ImproperError, InfConvolution, NotConvexError, PlqFunction, add,
                          conjugate, convex_hull, fenchel_young_gap, minimize, subdifferential,
                          transform_shift_tilt)
from fitzcert.sets import SetOnLine

INF = math.inf
XS = np.linspace(-6, 6, 121)


def test_known_conjugates():
    q = PlqFunction.quadratic(0.5)
    assert conjugate(q).isclose(q)
    assert conjugate(PlqFunction.abs()).isclose(PlqFunction.indicator(-1, 1))
    assert conjugate(PlqFunction.indicator(0, 1)).isclose(PlqFunction.support(0, 1))
    assert conjugate(PlqFunction.indicator(0, INF)).isclose(PlqFunction.indicator(-INF, 0))


def test_indicator_values():
    f = PlqFunction.indicator(0, 1)
    assert list(f.evaluate([-0.1, 0, 0.5, 1, 1.1])) == [INF, 0, 0, 0, INF]


def test_parse_builtins():
    assert PlqFunction.parse("quad(0.5)").isclose(PlqFunction.quadratic(0.5))
    assert PlqFunction.parse("ind[-inf, 0]").isclose(PlqFunction.indicator(-INF, 0))
    assert PlqFunction.parse("sup[-1,1]").isclose(PlqFunction.abs())
    with pytest.raises(ValueError):
        PlqFunction.parse("cosh")


@settings(max_examples=60, deadline=None)
@given(convex_plq())
def test_biconjugate_is_identity(f):
    assert conjugate(conjugate(f)).isclose(f, 1e-9)


@settings(max_examples=60, deadline=None)
@given(convex_plq(), half_integers, half_integers)
def test_fenchel_young_inequality(f, x, xs):
    gap = fenchel_young_gap(f, x, xs)
    assert gap >= -1e-9


@settings(max_examples=60, deadline=None)
@given(convex_plq(), half_integers)
def test_young_equality_exactly_on_subdifferential(f, x):
    sd = subdifferential(f, x)
    if sd.is_empty:
        return
    lo, hi = sd.lo, sd.hi
    xs = lo if math.isfinite(lo) else (hi if math.isfinite(hi) else 0.0)
    assert abs(fenchel_young_gap(f, x, xs)) <= 1e-9
    if math.isfinite(hi):
        assert fenchel_young_gap(f, x, hi + 1) > 0
    if math.isfinite(lo):
        assert fenchel_young_gap(f, x, lo - 1) > 0


@settings(max_examples=40, deadline=None)
@given(convex_plq(), convex_plq())
def test_infconv_conjugate_is_sum_of_conjugates(f, g):
    try:
        ic = InfConvolution(f, g)
    except ImproperError:
        return
    lhs = conjugate(ic.value).evaluate(XS)
    rhs = conjugate(f).evaluate(XS) + conjugate(g).evaluate(XS)
    assert np.array_equal(np.isinf(lhs), np.isinf(rhs))
    fin = np.isfinite(lhs)
    np.testing.assert_allclose(lhs[fin], rhs[fin], atol=1e-9)


def test_infconv_exactness_and_witness():
    ic = InfConvolution(PlqFunction.quadratic(0.5), PlqFunction.quadratic(0.5))
    assert ic.value.isclose(PlqFunction.quadratic(0.25))
    assert ic(2.0) == pytest.approx(1.0)
    assert ic.is_exact_at(2.0) and ic.is_lsc_at(2.0)


def test_infconv_of_disjoint_rays_is_not_attained_off_domain():
    ic = InfConvolution(PlqFunction.indicator(0, INF), PlqFunction.indicator(0, 0))
    assert ic.value.isclose(PlqFunction.indicator(0, INF))
    assert not ic.is_exact_at(-1.0)


def test_add_and_shift_tilt():
    f = add(PlqFunction.abs(), PlqFunction.quadratic(1.0))
    assert f(1.0) == 2.0
    g = transform_shift_tilt(PlqFunction.abs(), 1.0, 2.0)
    assert g(3.0) == pytest.approx(2.0 - 6.0)
    with pytest.raises(ImproperError):
        add(PlqFunction.indicator(0, 1), PlqFunction.indicator(2, 3))


def test_minimize_reports_interval_of_minimisers():
    r = minimize(PlqFunction.indicator(-1, 1))
    assert r.value == 0 and r.argmin == SetOnLine.interval(-1, 1)
    assert not minimize(PlqFunction.linear(1.0)).attained


def test_subdifferential_at_kink_and_boundary():
    assert subdifferential(PlqFunction.abs(), 0.0) == SetOnLine.interval(-1, 1)
    assert subdifferential(PlqFunction.indicator(0, INF), 0.0) == SetOnLine.interval(-INF, 0)
    assert subdifferential(PlqFunction.indicator(0, INF), -1.0).is_empty


def test_subdifferential_at_smooth_node_with_rounded_slopes():
    f = PlqFunction.from_pieces([-1.0], [(0.5, 1.75, 1.5), (1 / 3, 1.4166666666666665, 4 / 3)],
                                [0.25])
    assert subdifferential(f, -1.0) == SetOnLine.point(0.75)


def test_nonconvex_input_is_rejected_where_convexity_is_needed():
    w = PlqFunction.quadratic(-1.0)
    with pytest.raises(NotConvexError):
        minimize(w)
    hull = convex_hull(PlqFunction.from_pieces([0.0], [(0, -1, 0), (0, 1, 0)], [1.0]))
    assert hull.isclose(PlqFunction.abs())


def test_json_round_trip():
    f = PlqFunction.indicator(0, 1).add_linear(2.0, 1.0)
    assert PlqFunction.from_json(f.to_json()).isclose(f)
