import math

import numpy as np
import pytest

from fitzcert.grid import (Axis, GridError, GridFn, attainment_probe, discrete_infconv, llt_1d,
                           llt_2d, slope_range_axis)
from fitzcert.plq import PlqFunction, conjugate

INF = math.inf


def test_axis_nodes_and_snap():
    ax = Axis(-1.0, 1.0, 5)
    assert ax.h == 0.5
    np.testing.assert_allclose(ax.nodes, [-1, -0.5, 0, 0.5, 1])
    assert ax.snap(0.3) == 3 and ax.snap(0.2) == 2
    assert ax.snap(3.0) == -1
    with pytest.raises(GridError):
        Axis(1.0, -1.0, 5)


def test_sampling_keeps_infinities():
    ax = Axis(-2.0, 2.0, 9)
    F = GridFn.sample(PlqFunction.indicator(0, 1), (ax,))
    assert np.isinf(F.values[ax.nodes < 0]).all()
    assert (F.values[(ax.nodes >= 0) & (ax.nodes <= 1)] == 0).all()


def test_llt_matches_exact_conjugate_on_grid_slopes():
    ax = Axis(-4.0, 4.0, 81)
    f = PlqFunction.quadratic(0.5)
    dual = Axis(-2.0, 2.0, 41)
    G = llt_1d(GridFn.sample(f, (ax,)), dual, mark_boundary=False)
    np.testing.assert_allclose(G.values, conjugate(f).evaluate(dual.nodes), atol=1e-12)


def test_llt_marks_boundary_maximisers():
    ax = Axis(-1.0, 1.0, 21)
    F = GridFn.sample(PlqFunction.zero(), (ax,))
    with pytest.raises(GridError):
        llt_1d(F, Axis(1.0, 2.0, 3))  # every slope is maximised at the grid edge
    G = llt_1d(F, Axis(-2.0, 2.0, 5))
    assert np.isinf(G.values[[0, 1, 3, 4]]).all() and G.values[2] == 0


def test_llt_2d_of_separable_quadratic():
    ax = Axis(-4.0, 4.0, 41)
    X, Y = np.meshgrid(ax.nodes, ax.nodes, indexing="ij")
    F = GridFn((ax, ax), 0.5 * X**2 + 0.5 * Y**2)
    dual = Axis(-2.0, 2.0, 21)
    H = llt_2d(F, (dual, dual), mark_boundary=False)
    U, V = np.meshgrid(dual.nodes, dual.nodes, indexing="ij")
    np.testing.assert_allclose(H.values, 0.5 * U**2 + 0.5 * V**2, atol=1e-12)


def test_slope_range_axis_covers_grid_slopes():
    ax = Axis(-1.0, 1.0, 11)
    dual = slope_range_axis(GridFn.sample(PlqFunction.abs(), (ax,)))
    assert dual.lo <= -1 and dual.hi >= 1


def test_discrete_infconv_of_quadratics():
    ax = Axis(-3.0, 3.0, 61)
    F = GridFn.sample(PlqFunction.quadratic(0.5), (ax,))
    H = discrete_infconv(F, F, points=[0.0, 1.0, 2.0])
    np.testing.assert_allclose(H, [0.0, 0.25, 1.0], atol=1e-12)
    with pytest.raises(GridError):
        discrete_infconv(F, GridFn.sample(PlqFunction.zero(), (Axis(-3.0, 3.0, 31),)))


def test_attainment_probe_statuses():
    ax = Axis(-4.0, 4.0, 81)
    q = GridFn.sample(PlqFunction.quadratic(0.5), (ax,))
    r = attainment_probe(q, q, None, [1.0])
    assert r.attained and r.point[0] == pytest.approx(0.5) and r.value == pytest.approx(0.25)
    exact = PlqFunction.quadratic(0.5)
    r = attainment_probe(exact.evaluate, exact.evaluate, None, [1.0], axes=(ax,))
    assert r.attained and r.value == pytest.approx(0.25, abs=1e-12)
    lin = GridFn.sample(PlqFunction.linear(1.0), (ax,))
    zero = GridFn.sample(PlqFunction.zero(), (ax,))
    assert attainment_probe(lin, zero, None, [0.0]).status == "boundary"


def test_json_round_trip():
    ax = Axis(-1.0, 1.0, 5)
    F = GridFn.sample(PlqFunction.indicator(0, INF), (ax,))
    G = GridFn.from_json(F.to_json())
    np.testing.assert_array_equal(F.values, G.values)
