import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import convex_plq, graphs, half_integers, operator_fixtures
from fitzcert.operators import (GraphError, MonotoneGraph, antiderivative, domain, duality_map,
                                evaluate, from_subdifferential, maximality_check, normal_cone,
                                parse_operator, range_, shift, sum_range_oracle)
from fitzcert.plq import PlqFunction, subdifferential
from fitzcert.sets import SetOnLine

INF = math.inf


def test_non_monotone_chain_is_rejected():
    with pytest.raises(GraphError):
        MonotoneGraph.from_polyline([(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        MonotoneGraph.line(-1.0)


@pytest.mark.parametrize("name,T", list(operator_fixtures().items()))
def test_fixtures_are_maximal(name, T):
    assert T.is_maximal
    assert T.minty().is_real_line


def test_truncated_graph_is_not_maximal():
    assert not maximality_check(MonotoneGraph.from_polyline([(0, 0), (1, 1)]))


def test_normal_cone_values():
    N = normal_cone(0.0, INF)
    assert evaluate(N, 0.0) == SetOnLine.interval(-INF, 0, False, True)
    assert evaluate(N, 2.0) == SetOnLine.point(0.0)
    assert evaluate(N, -1.0).is_empty
    assert domain(N) == SetOnLine.interval(0, INF, True, False)
    assert range_(N) == SetOnLine.interval(-INF, 0, False, True)


def test_duality_map_is_identity():
    J = duality_map()
    assert evaluate(J, 2.5) == SetOnLine.point(2.5)


def test_shift_moves_the_graph():
    T = shift(normal_cone(0.0, INF), 1.0)
    assert domain(T) == SetOnLine.interval(-1, INF, True, False)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_antiderivative_inverts_subdifferential(T):
    F = antiderivative(T)
    assert from_subdifferential(F).isclose(T)


@settings(max_examples=60, deadline=None)
@given(convex_plq(), half_integers)
def test_graph_values_match_convex_subdifferential(f, x):
    T = from_subdifferential(f)
    assert evaluate(T, x).isclose(subdifferential(f, x))


def test_ulp_disagreement_between_node_and_piece_slopes():
    f = PlqFunction((1.25, 2.75, 3.75),
                    ((0.25, -1.375, 1.328125), (1 / 6, -7 / 6, 1.1979166666666665),
                     (0.0, -0.25, -0.0625), None),
                    (0.0, -0.75, -1.0))
    T = from_subdifferential(f)
    assert T.is_maximal
    assert evaluate(T, 2.75).isclose(SetOnLine.point(-0.25))


def test_oracle_on_known_sums():
    S, T = normal_cone(0.0, INF), normal_cone(0.0, 0.0)
    assert sum_range_oracle(S, T, 0.0).is_real_line
    assert sum_range_oracle(S, T, -1.0).is_empty
    R = sum_range_oracle(normal_cone(0.0, INF), duality_map())
    assert R.is_real_line


@settings(max_examples=40, deadline=None)
@given(graphs(), graphs(), half_integers)
def test_oracle_agrees_with_pointwise_sums(S, T, p):
    R = sum_range_oracle(S, T, p)
    Sp = shift(S, p)
    for x in np.linspace(-4, 4, 33):
        a, b = evaluate(Sp, x), evaluate(T, x)
        if a.is_empty or b.is_empty:
            continue
        lo, hi = a.lo + b.lo, a.hi + b.hi
        for v in (lo, hi):
            if math.isfinite(v):
                assert R.contains(v, 1e-9)


def test_parse_operator():
    assert parse_operator("J").isclose(duality_map())
    assert parse_operator("ncone[0, inf]").isclose(normal_cone(0.0, INF))
    assert parse_operator("subdiff(abs)").isclose(from_subdifferential(PlqFunction.abs()))
    with pytest.raises(GraphError):
        parse_operator("K")


def test_json_round_trip():
    for T in operator_fixtures().values():
        assert MonotoneGraph.from_json(T.to_json()).isclose(T)
