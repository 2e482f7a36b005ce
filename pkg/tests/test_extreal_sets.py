import math

import pytest

from fitzcert.extreal import ExtRealError, ext_add, ext_mul, ext_sum, from_json, to_json
from fitzcert.sets import Interval, SetOnLine

INF = math.inf


def test_ext_add_refuses_opposite_infinities():
    assert ext_add(INF, 3.0) == INF
    with pytest.raises(ExtRealError):
        ext_add(INF, -INF)
    with pytest.raises(ExtRealError):
        ext_sum([1.0, -INF, INF])


def test_zero_times_infinity_is_zero():
    assert ext_mul(0.0, INF) == 0.0
    assert ext_mul(-2.0, INF) == -INF


@pytest.mark.parametrize("x", [INF, -INF, 0.0, -1.5])
def test_json_round_trip(x):
    assert from_json(to_json(x)) == x


def test_interval_membership_respects_open_ends():
    iv = Interval.open(0.0, 1.0)
    assert iv.contains(0.5) and not iv.contains(0.0) and not iv.contains(1.0)
    assert Interval.closed(0.0, 1.0).contains(1.0)
    assert Interval.point(2.0).is_point


def test_union_merges_touching_components():
    u = SetOnLine.interval(0, 1, True, False).union(SetOnLine.interval(1, 2))
    assert u == SetOnLine.interval(0, 2)
    assert SetOnLine.interval(-INF, 0).union(SetOnLine.interval(0, INF)).is_real_line


def test_shift_and_intersects():
    s = SetOnLine.interval(0, 1).shift(2.0)
    assert s.contains(2.5) and not s.contains(0.5)
    assert s.intersects(SetOnLine.point(3.0))
    assert not s.intersects(SetOnLine.interval(3, 4, False, True))


def test_set_json_round_trip():
    s = SetOnLine.interval(-INF, 0, False, True).union(SetOnLine.point(2.0))
    assert SetOnLine.from_json(s.to_json()) == s
    assert str(SetOnLine.empty()) == "{}"
