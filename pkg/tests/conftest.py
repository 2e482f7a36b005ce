import math

import numpy as np
import pytest
from hypothesis import strategies as st

from fitzcert.operators import (MonotoneGraph, duality_map, from_subdifferential, normal_cone,
                                random_maximal_graph)
from fitzcert.plq import PlqFunction

INF = math.inf

# criterion number -> (passed, detail), filled in by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def example1():
    """S = subdifferential of the indicator of [0, inf), T = that of {0}."""
    return normal_cone(0.0, INF), normal_cone(0.0, 0.0)


def sloped_graph():
    return MonotoneGraph.from_polyline([(-1, -1), (0, 0), (0, 1), (1, 2)], (1, 0), (0, 1))


def operator_fixtures():
    S, T = example1()
    return {
        "example1_S": S,
        "example1_T": T,
        "J": duality_map(),
        "ncone_ball": normal_cone(-1.0, 1.0),
        "subdiff_abs": from_subdifferential(PlqFunction.abs()),
        "ncone_line": normal_cone(-INF, INF),
        "staircase": MonotoneGraph.from_polyline([(-1, 0), (0, 0), (0, 1), (2, 1)], (0, 1), (0, 1)),
        "sloped": sloped_graph(),
    }


@pytest.fixture
def ex1():
    return example1()


@st.composite
def graphs(draw, max_vertices=4):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_maximal_graph(np.random.default_rng(seed), max_vertices=max_vertices)


@st.composite
def convex_plq(draw):
    """Convex lsc PLQ functions: potentials of random maximal monotone graphs."""
    from fitzcert.operators import antiderivative
    return antiderivative(draw(graphs()))


half_integers = st.integers(-8, 8).map(lambda k: k / 2)
