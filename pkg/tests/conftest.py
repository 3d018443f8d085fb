import pytest

from wdmsim.topology import default_topology, parse_topology

SQUARE = """\
nodes 4
link 0 1 10 8
link 1 2 10 8
link 2 3 10 8
link 3 0 10 8
"""

TWO_ROUTE = """\
nodes 4
link 0 2 10 2
link 0 3 10 2
link 1 2 10 2
link 1 3 10 2
"""


@pytest.fixture
def square():
    """4-node ring: two link-disjoint routes between any node pair."""
    return parse_topology(SQUARE)


@pytest.fixture
def two_route():
    """0 and 1 joined by two disjoint 2-hop routes (via 2 and via 3)."""
    return parse_topology(TWO_ROUTE)


@pytest.fixture
def mesh8():
    """The default 8-node ring-with-chords topology, 8 channels per link."""
    return default_topology()
