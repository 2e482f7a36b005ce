import math
from fractions import Fraction

import pytest

from fitzcert.polyhedra import PolyhedralSet2D, h_to_v, v_to_h

INF = math.inf

HALF_PLANE = PolyhedralSet2D.from_constraints([((-1, 0), 0)])  # x >= 0


def test_h_to_v_of_quadrant():
    points, rays, lines = h_to_v([((-1, 0), 0), ((0, -1), 0)], [], 2)
    assert points == [(0, 0)]
    assert sorted(rays) == [(0, 1), (1, 0)]
    assert lines == []


def test_v_to_h_round_trip_is_exact():
    pts = [(0, 0), (1, 0), (Fraction(1, 3), 1)]
    S = PolyhedralSet2D.from_generators(pts)
    T = PolyhedralSet2D.from_constraints(*v_to_h(pts))
    assert S == T
    assert S.contains((Fraction(1, 3), Fraction(1, 3)))
    assert not S.contains((1, 1))


def test_empty_and_plane():
    empty = PolyhedralSet2D.from_constraints([((1, 0), -1), ((-1, 0), -1)])
    assert empty.is_empty
    assert PolyhedralSet2D.plane().is_whole_plane
    assert PolyhedralSet2D.plane().describe() == "R x R"


def test_relative_interior_and_interior():
    ri = HALF_PLANE.relative_interior()
    assert ri.describe() == "(0, +inf) x R"
    assert not ri.contains((0, 0)) and ri.contains((1, -5))
    line = PolyhedralSet2D.from_constraints(eqs=[((1, 0), 0)])
    assert line.interior().is_empty
    assert line.relative_interior().contains((0, 3))
    assert line.dimension == 1


def test_minkowski_sum_and_negation():
    seg = PolyhedralSet2D.box((0, 1), (0, 0))
    ray = PolyhedralSet2D.box((0, INF), (0, 0))
    assert seg.minkowski_sum(ray.negate()) == PolyhedralSet2D.box((-INF, 1), (0, 0))
    assert HALF_PLANE.reflect_second() == HALF_PLANE


def test_lines_and_lineality():
    assert HALF_PLANE.contains_line((1, 0), (0, 1))
    assert not HALF_PLANE.contains_line((1, 0), (1, 0))
    assert len(HALF_PLANE.lineality()) == 1


def test_intersection_and_box_description():
    a = PolyhedralSet2D.box((0, 2), (0, 2))
    b = PolyhedralSet2D.box((1, 3), (-1, 1))
    assert a.intersect(b) == PolyhedralSet2D.box((1, 2), (0, 1))
    assert a.intersects(b)
    assert not a.intersects(PolyhedralSet2D.box((5, 6), (0, 0)))
    assert a.as_box() is not None


@pytest.mark.parametrize("t", [(1, 2), (-3, Fraction(1, 2))])
def test_translate_is_exact(t):
    moved = HALF_PLANE.translate(t)
    assert moved.contains((t[0], 0)) and not moved.contains((t[0] - Fraction(1, 10**9), 0))
