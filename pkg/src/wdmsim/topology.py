"""Network model: nodes, bidirectional links, per-direction wavelength channels.

Links are declared once per unordered node pair but carry two independent
channel lanes, one per travel direction; a lightpath occupies the lane that
matches its direction of travel.  Channel state is an owner map so that
exclusivity and ownership can be enforced on every occupy/release.
"""

from __future__ import annotations

import itertools
from collections import deque

from .errors import (
    ChannelBusyError,
    ChannelFreeError,
    LinkDownError,
    NotOwnerError,
    TopologyError,
    TopologyParseError,
)

FORWARD = 0  # travel a -> b
REVERSE = 1  # travel b -> a


class Link:
    """One fiber link; ``a``/``b`` are its endpoints as declared."""

    def __init__(self, link_id: int, a: int, b: int, delay: float, total_channels: int):
        if a == b:
            raise TopologyError(f"self-loop link at node {a}")
        if delay <= 0:
            raise TopologyError(f"link {link_id}: delay must be positive")
        if total_channels < 1:
            raise TopologyError(f"link {link_id}: total_channels must be >= 1")
        self.id = link_id
        self.a = a
        self.b = b
        self.delay = delay
        self.total_channels = total_channels
        self.up = True
        # one owner slot per wavelength per lane; None means free
        self._owners = ([None] * total_channels, [None] * total_channels)

    def __repr__(self):
        return f"Link({self.id}: {self.a}<->{self.b}, {self.total_channels}ch)"

    def lane(self, u: int, v: int) -> int:
        """Lane index for travelling u -> v over this link."""
        if (u, v) == (self.a, self.b):
            return FORWARD
        if (u, v) == (self.b, self.a):
            return REVERSE
        raise TopologyError(f"link {self.id} does not join {u} and {v}")

    def other_end(self, u: int) -> int:
        if u == self.a:
            return self.b
        if u == self.b:
            return self.a
        raise TopologyError(f"node {u} is not an endpoint of link {self.id}")

    def owner(self, lane: int, w: int):
        self._check_wavelength(w)
        return self._owners[lane][w]

    def free_indices(self, lane: int) -> list[int]:
        return [w for w, o in enumerate(self._owners[lane]) if o is None]

    def free_count(self, lane: int) -> int:
        return sum(1 for o in self._owners[lane] if o is None)

    def occupied_count(self, lane: int) -> int:
        return self.total_channels - self.free_count(lane)

    def load_index(self, lane: int = FORWARD) -> float:
        """Fraction of free channels in the lane; a down link reports 0."""
        if not self.up:
            return 0.0
        return self.free_count(lane) / self.total_channels

    def occupy(self, lane: int, w: int, owner) -> None:
        self._check_wavelength(w)
        if not self.up:
            raise LinkDownError(f"link {self.id} is down")
        if self._owners[lane][w] is not None:
            raise ChannelBusyError(
                f"link {self.id} lane {lane} wavelength {w} owned by {self._owners[lane][w]}"
            )
        self._owners[lane][w] = owner

    def release(self, lane: int, w: int, owner) -> None:
        self._check_wavelength(w)
        current = self._owners[lane][w]
        if current is None:
            raise ChannelFreeError(f"link {self.id} lane {lane} wavelength {w} is already free")
        if current != owner:
            raise NotOwnerError(
                f"link {self.id} lane {lane} wavelength {w}: owner is {current}, not {owner}"
            )
        self._owners[lane][w] = None

    def _check_wavelength(self, w: int) -> None:
        if not 0 <= w < self.total_channels:
            raise TopologyError(f"wavelength {w} out of range for link {self.id}")


class Topology:
    """Validated network graph with deterministic adjacency ordering."""

    def __init__(self, num_nodes: int, links: list[Link]):
        if num_nodes < 1:
            raise TopologyError("topology needs at least one node")
        self.num_nodes = num_nodes
        self.links = list(links)
        self._by_pair: dict[tuple[int, int], Link] = {}
        self.adjacency: list[list[Link]] = [[] for _ in range(num_nodes)]
        seen_ids = set()
        for link in self.links:
            if link.id in seen_ids:
                raise TopologyError(f"duplicate link id {link.id}")
            seen_ids.add(link.id)
            for end in (link.a, link.b):
                if not 0 <= end < num_nodes:
                    raise TopologyError(f"dangling node reference: link {link.id} names node {end}")
            pair = (min(link.a, link.b), max(link.a, link.b))
            if pair in self._by_pair:
                raise TopologyError(f"duplicate link between {pair[0]} and {pair[1]}")
            self._by_pair[pair] = link
            self.adjacency[link.a].append(link)
            self.adjacency[link.b].append(link)
        for incident in self.adjacency:
            incident.sort(key=lambda l: l.id)
        self._lightpath_ids = itertools.count(1)

    def has_node(self, n: int) -> bool:
        return 0 <= n < self.num_nodes

    def link_between(self, u: int, v: int) -> Link | None:
        return self._by_pair.get((min(u, v), max(u, v)))

    def neighbors(self, u: int):
        """Yield (neighbor, link) in ascending neighbor order."""
        pairs = [(link.other_end(u), link) for link in self.adjacency[u]]
        pairs.sort(key=lambda p: p[0])
        return pairs

    def hops(self, route: list[int] | tuple[int, ...]) -> list[tuple[Link, int]]:
        """Resolve a node sequence into (link, lane) hops."""
        hops = []
        for u, v in zip(route, route[1:]):
            link = self.link_between(u, v)
            if link is None:
                raise TopologyError(f"no link between {u} and {v}")
            hops.append((link, link.lane(u, v)))
        return hops

    def next_lightpath_id(self) -> int:
        return next(self._lightpath_ids)

    def occupancy_snapshot(self) -> tuple:
        """Hashable copy of every lane's owner map, for purity/leak checks."""
        return tuple((link.id, tuple(link._owners[0]), tuple(link._owners[1])) for link in self.links)

    def total_channel_count(self, up_only: bool = True) -> int:
        return sum(2 * l.total_channels for l in self.links if l.up or not up_only)

    def occupied_channel_count(self, up_only: bool = True) -> int:
        return sum(
            l.occupied_count(FORWARD) + l.occupied_count(REVERSE)
            for l in self.links
            if l.up or not up_only
        )

    def is_connected(self) -> bool:
        if self.num_nodes == 1:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v, link in self.neighbors(u):
                if link.up and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.num_nodes


def set_link_state(link: Link, up: bool) -> None:
    """Flip link status; occupancy is untouched and repeated calls are no-ops."""
    link.up = up


def parse_topology(text: str) -> Topology:
    """Parse a topology document.

    Grammar (line oriented, ``#`` starts a comment)::

        nodes <count>
        link <a> <b> <delay_ms> <channels>    # one line per link

    Node ids are 0-based; delays are milliseconds in the file and seconds
    in memory.
    """
    num_nodes = None
    raw_links: list[tuple[int, int, int, float, int]] = []
    seen_pairs: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "nodes":
            if num_nodes is not None:
                raise TopologyParseError("duplicate nodes header", line_no)
            if len(fields) != 2:
                raise TopologyParseError("expected: nodes <count>", line_no)
            try:
                num_nodes = int(fields[1])
            except ValueError:
                raise TopologyParseError(f"bad node count {fields[1]!r}", line_no) from None
            if num_nodes < 1:
                raise TopologyParseError("node count must be >= 1", line_no)
        elif fields[0] == "link":
            if num_nodes is None:
                raise TopologyParseError("link before nodes header", line_no)
            if len(fields) != 5:
                raise TopologyParseError("expected: link <a> <b> <delay_ms> <channels>", line_no)
            try:
                a, b = int(fields[1]), int(fields[2])
                delay_ms = float(fields[3])
                channels = int(fields[4])
            except ValueError:
                raise TopologyParseError(f"bad link fields {fields[1:]!r}", line_no) from None
            for end in (a, b):
                if not 0 <= end < num_nodes:
                    raise TopologyParseError(f"dangling node reference {end}", line_no)
            pair = (min(a, b), max(a, b))
            if pair in seen_pairs:
                raise TopologyParseError(f"duplicate link between {pair[0]} and {pair[1]}", line_no)
            seen_pairs.add(pair)
            raw_links.append((line_no, a, b, delay_ms, channels))
        else:
            raise TopologyParseError(f"unknown directive {fields[0]!r}", line_no)
    if num_nodes is None:
        raise TopologyParseError("missing nodes header", 1)
    links = []
    for i, (line_no, a, b, delay_ms, channels) in enumerate(raw_links):
        try:
            links.append(Link(i, a, b, delay_ms / 1000.0, channels))
        except TopologyError as err:
            raise TopologyParseError(str(err), line_no) from None
    try:
        return Topology(num_nodes, links)
    except TopologyError:
        raise


def read_topology(path) -> Topology:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_topology(fh.read())


# Stand-in 8-node mesh: a bidirectional ring plus three chords.  Average
# degree 2.75; any topology file can replace it.
DEFAULT_RING_CHORDS = [(i, (i + 1) % 8) for i in range(8)] + [(0, 4), (1, 5), (2, 6)]


def default_topology_text(channels: int = 8, delay_ms: float = 10.0) -> str:
    lines = ["# default 8-node mesh: ring 0..7 plus chords 0-4, 1-5, 2-6", "nodes 8"]
    for a, b in DEFAULT_RING_CHORDS:
        lines.append(f"link {a} {b} {delay_ms:g} {channels}")
    return "\n".join(lines) + "\n"


def default_topology(channels: int = 8, delay_ms: float = 10.0) -> Topology:
    return parse_topology(default_topology_text(channels, delay_ms))
