import math

import numpy as np
import pytest

from conftest import example1, operator_fixtures, sloped_graph
from fitzcert.fitzpatrick import (PolyhedralFn, QuadraticFn, SeparableFn, SegmentwiseFn,
                                  add_linear, bivariate_from_json, conjugate_bivariate,
                                  fenchel_representative, fitzpatrick_fn, graph_distance,
                                  graph_sample, hat_transform, infconv_polyhedral, psi_T,
                                  representative, representative_validity_check)
from fitzcert.grid import Axis
from fitzcert.operators import duality_map, from_subdifferential, normal_cone
from fitzcert.plq import PlqFunction

INF = math.inf
AX = Axis.symmetric(6.0, 121)
X, XS = np.meshgrid(AX.nodes, AX.nodes, indexing="ij")


def test_representative_kinds_follow_graph_shape():
    S, T = example1()
    assert isinstance(fitzpatrick_fn(S), PolyhedralFn)
    assert isinstance(fitzpatrick_fn(duality_map()), QuadraticFn)
    assert isinstance(fitzpatrick_fn(sloped_graph()), SegmentwiseFn)
    assert isinstance(fenchel_representative(S), SeparableFn)


def test_fitzpatrick_of_duality_map():
    phi = fitzpatrick_fn(duality_map())
    np.testing.assert_allclose(phi.evaluate_grid(X, XS), (X + XS) ** 2 / 4, atol=1e-12)


def test_fenchel_representative_is_f_plus_conjugate():
    h = fenchel_representative(PlqFunction.quadratic(0.5))
    np.testing.assert_allclose(h.evaluate_grid(X, XS), 0.5 * X**2 + 0.5 * XS**2, atol=1e-12)


@pytest.mark.parametrize("name,T", list(operator_fixtures().items()))
@pytest.mark.parametrize("kind", ["fitzpatrick", "fenchel"])
def test_representatives_are_valid(name, T, kind):
    rep = representative_validity_check(representative(T, kind), T, (AX, AX))
    assert rep.passed, rep.details


@pytest.mark.parametrize("name,T", list(operator_fixtures().items()))
def test_fitzpatrick_is_below_psi_and_fenchel(name, T):
    phi = fitzpatrick_fn(T).evaluate_grid(X, XS)
    psi = psi_T(T, graph_sample(T, 6.0)).evaluate_grid(X, XS)
    fen = fenchel_representative(T).evaluate_grid(X, XS)
    assert np.all(phi <= psi + 1e-9 * (1 + np.abs(psi)))
    assert np.all(phi <= fen + 1e-9 * (1 + np.abs(fen)))


def test_invalid_candidate_is_flagged():
    T = normal_cone(0.0, INF)
    bad = fenchel_representative(normal_cone(-1.0, 1.0))
    assert not representative_validity_check(bad, T, (AX, AX)).passed


def test_polyhedral_conjugate_is_involutive():
    phi = fitzpatrick_fn(normal_cone(-1.0, 1.0))
    assert phi.conjugate().conjugate().same_function(phi)
    assert conjugate_bivariate(phi).arg_order != phi.arg_order


def test_hat_flips_second_argument():
    phi = fitzpatrick_fn(from_subdifferential(PlqFunction.abs()))
    h = hat_transform(phi)
    np.testing.assert_array_equal(h.evaluate_grid(X, XS), phi.evaluate_grid(X, -XS))


def test_add_linear_tilts_values():
    q = fitzpatrick_fn(duality_map())
    t = add_linear(q, 1.0, -2.0)
    np.testing.assert_allclose(t.evaluate_grid(X, XS),
                               (X + XS) ** 2 / 4 + X - 2 * XS, atol=1e-12)


def test_exact_infconv_on_example1():
    S, T = example1()
    h = infconv_polyhedral(fitzpatrick_fn(S).conjugate(),
                           fitzpatrick_fn(T).hat().conjugate())
    assert h.same_function(PolyhedralFn.indicator(ineqs=[((0, -1), 0)]))


def test_graph_distance_zero_on_graph():
    T = sloped_graph()
    pts = np.array(graph_sample(T, 4.0))
    d = graph_distance(T, pts[:, 0], pts[:, 1])
    assert np.max(d) <= 1e-12
    assert graph_distance(T, np.array([5.0]), np.array([-5.0]))[0] > 1


@pytest.mark.parametrize("name,T", list(operator_fixtures().items()))
def test_json_round_trip(name, T):
    h = fitzpatrick_fn(T)
    back = bivariate_from_json(h.to_json())
    np.testing.assert_array_equal(back.evaluate_grid(X, XS), h.evaluate_grid(X, XS))
