import pytest
from hypothesis import given, strategies as st

from wdmsim.errors import (
    ChannelBusyError,
    ChannelFreeError,
    LinkDownError,
    NotOwnerError,
    TopologyError,
    TopologyParseError,
)
from wdmsim.topology import (
    FORWARD,
    REVERSE,
    Link,
    Topology,
    default_topology,
    parse_topology,
    set_link_state,
)


# -- parsing ------------------------------------------------------------------

def test_parse_roundtrip_counts(square):
    assert square.num_nodes == 4
    assert len(square.links) == 4
    assert square.links[0].delay == pytest.approx(0.010)
    assert square.links[0].total_channels == 8


def test_parse_ignores_comments_and_blank_lines():
    topo = parse_topology("# header\n\nnodes 2\n  # indented\nlink 0 1 5 3\n")
    assert topo.num_nodes == 2
    assert topo.links[0].delay == pytest.approx(0.005)
    assert topo.links[0].total_channels == 3


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("link 0 1 10 8\n", "nodes"),
        ("nodes 2\nlink 0 5 10 8\n", "dangling"),
        ("nodes 2\nlink 0 1 10 8\nlink 1 0 10 8\n", "duplicate"),
        ("nodes 2\nlink 0 0 10 8\n", "self"),
        ("nodes 0\n", "node count"),
        ("nodes 2\nlink 0 1 10\n", "link"),
        ("nodes 2\nfrob 1 2\n", "frob"),
        ("nodes 2\nlink 0 1 10 0\n", "channel"),
    ],
)
def test_parse_rejects_malformed(text, fragment):
    with pytest.raises((TopologyParseError, TopologyError)) as err:
        parse_topology(text)
    assert fragment in str(err.value)


def test_parse_error_carries_line_number():
    with pytest.raises(TopologyParseError) as err:
        parse_topology("nodes 2\n# fine\nlink 0 9 10 8\n")
    assert "line 3" in str(err.value)


def test_default_topology_is_ring_with_chords():
    topo = default_topology()
    assert topo.num_nodes == 8
    assert len(topo.links) == 11
    assert topo.is_connected()
    assert all(l.total_channels == 8 for l in topo.links)
    assert all(l.delay == pytest.approx(0.010) for l in topo.links)


# -- lanes and occupancy ------------------------------------------------------

def test_lane_orientation(square):
    link = square.links[0]  # 0 -- 1
    assert link.lane(0, 1) == FORWARD
    assert link.lane(1, 0) == REVERSE
    with pytest.raises(TopologyError):
        link.lane(2, 3)


def test_lanes_are_independent(square):
    link = square.links[0]
    link.occupy(FORWARD, 0, owner=7)
    assert link.free_count(FORWARD) == 7
    assert link.free_count(REVERSE) == 8
    link.occupy(REVERSE, 0, owner=8)
    assert link.owner(FORWARD, 0) == 7
    assert link.owner(REVERSE, 0) == 8


def test_occupy_conflict_and_release_guards(square):
    link = square.links[0]
    link.occupy(FORWARD, 3, owner=1)
    with pytest.raises(ChannelBusyError):
        link.occupy(FORWARD, 3, owner=2)
    with pytest.raises(NotOwnerError):
        link.release(FORWARD, 3, owner=2)
    with pytest.raises(ChannelFreeError):
        link.release(FORWARD, 4, owner=1)
    link.release(FORWARD, 3, owner=1)
    assert link.free_count(FORWARD) == 8


def test_occupy_down_link_refused(square):
    link = square.links[0]
    set_link_state(link, up=False)
    with pytest.raises(LinkDownError):
        link.occupy(FORWARD, 0, owner=1)
    set_link_state(link, up=True)
    link.occupy(FORWARD, 0, owner=1)


def test_load_index_free_fraction(square):
    link = square.links[0]
    assert link.load_index(FORWARD) == 1.0
    for w in range(4):
        link.occupy(FORWARD, w, owner=1)
    assert link.load_index(FORWARD) == 0.5
    assert link.load_index(REVERSE) == 1.0
    set_link_state(link, up=False)
    assert link.load_index(FORWARD) == 0.0
    assert link.load_index(REVERSE) == 0.0


def test_down_link_remembers_occupancy(square):
    link = square.links[0]
    link.occupy(FORWARD, 2, owner=9)
    set_link_state(link, up=False)
    set_link_state(link, up=True)
    assert link.owner(FORWARD, 2) == 9


# -- topology queries ---------------------------------------------------------

def test_neighbors_sorted_and_complete(mesh8):
    nbrs = mesh8.neighbors(0)
    assert [v for v, _ in nbrs] == sorted(v for v, _ in nbrs)
    assert {v for v, _ in nbrs} == {1, 4, 7}


def test_link_between(square):
    assert square.link_between(0, 1) is square.links[0]
    assert square.link_between(1, 0) is square.links[0]
    assert square.link_between(0, 2) is None


def test_hops_maps_route_to_lanes(square):
    hops = square.hops((0, 1, 2))
    assert [(l.id, lane) for l, lane in hops] == [(0, FORWARD), (1, FORWARD)]
    hops_rev = square.hops((2, 1, 0))
    assert [(l.id, lane) for l, lane in hops_rev] == [(1, REVERSE), (0, REVERSE)]
    with pytest.raises(TopologyError):
        square.hops((0, 2))


def test_connectivity_accounts_for_down_links(square):
    assert square.is_connected()
    set_link_state(square.links[0], up=False)
    assert square.is_connected()  # still a path the other way round
    set_link_state(square.links[1], up=False)
    assert not square.is_connected()


def test_channel_totals(square):
    assert square.total_channel_count() == 4 * 2 * 8
    square.links[0].occupy(FORWARD, 0, owner=1)
    assert square.occupied_channel_count() == 1
    set_link_state(square.links[0], up=False)
    assert square.total_channel_count(up_only=True) == 3 * 2 * 8
    assert square.occupied_channel_count(up_only=True) == 0


def test_snapshot_reflects_mutation(square):
    before = square.occupancy_snapshot()
    square.links[2].occupy(REVERSE, 5, owner=3)
    assert square.occupancy_snapshot() != before
    square.links[2].release(REVERSE, 5, owner=3)
    assert square.occupancy_snapshot() == before


def test_lightpath_ids_monotone(square):
    ids = [square.next_lightpath_id() for _ in range(5)]
    assert ids == sorted(ids) and len(set(ids)) == 5


def test_duplicate_link_ids_rejected():
    links = [Link(0, 0, 1, 0.01, 8), Link(0, 1, 2, 0.01, 8)]
    with pytest.raises(TopologyError):
        Topology(3, links)


# -- properties ---------------------------------------------------------------

@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 7)), max_size=40))
def test_occupancy_conserved_under_random_churn(ops):
    """free + occupied == total regardless of the occupy/release sequence."""
    link = Link(0, 0, 1, 0.01, 8)
    held = {}
    for lane, w in ops:
        if (lane, w) in held:
            link.release(lane, w, owner=held.pop((lane, w)))
        else:
            owner = len(held) + 1
            link.occupy(lane, w, owner=owner)
            held[(lane, w)] = owner
        for probe_lane in (0, 1):
            assert link.free_count(probe_lane) + link.occupied_count(probe_lane) == 8
    for (lane, w), owner in held.items():
        link.release(lane, w, owner=owner)
    assert link.free_count(0) == link.free_count(1) == 8


@given(st.integers(0, 7), st.integers(0, 7))
def test_load_index_matches_free_fraction(k_fwd, k_rev):
    link = Link(0, 0, 1, 0.01, 8)
    for w in range(k_fwd):
        link.occupy(FORWARD, w, owner=1)
    for w in range(k_rev):
        link.occupy(REVERSE, w, owner=1)
    assert link.load_index(FORWARD) == (8 - k_fwd) / 8
    assert link.load_index(REVERSE) == (8 - k_rev) / 8
