import pytest

from causalot import Spacetime


@pytest.fixture
def mink():
    return Spacetime("minkowski-1+1")


@pytest.fixture
def mink_alpha4():
    return Spacetime("minkowski-1+1", alpha=4.0)


@pytest.fixture
def edge_graph():
    # single edge A-B of optical length 2
    return Spacetime("static-graph", vertices=["A", "B"], edges=[("A", "B", 2.0)])


@pytest.fixture
def chain_graph():
    # path A-B-C with lengths 1 and 2
    return Spacetime("static-graph", vertices=["A", "B", "C"],
                     edges=[("A", "B", 1.0), ("B", "C", 2.0)])


@pytest.fixture
def net_graph():
    # small net with a shortcut, short edges for unit-step moves, and a far
    # pendant vertex Z used to inject unreachable atoms
    return Spacetime(
        "static-graph",
        vertices=["A", "B", "C", "D", "Z"],
        edges=[("A", "B", 0.5), ("B", "C", 0.5), ("A", "C", 1.0),
               ("C", "D", 0.5), ("A", "Z", 64.0)],
    )
