"""Brute-force reference implementations used to cross-check the fast paths.

Everything here trades efficiency for obviousness: exhaustive DFS over
simple paths, explicit sort-and-truncate candidate selection.  Costs are
accumulated left-to-right along each path so floating-point sums agree
exactly with Dijkstra's incremental accumulation.
"""

from __future__ import annotations

import random

from wdmsim.topology import Link, Topology, set_link_state


def simple_paths(topology: Topology, src: int, dst: int, banned_links=frozenset()):
    """Yield every loop-free route src..dst as a node tuple."""
    stack = [(src, (src,))]
    while stack:
        node, route = stack.pop()
        if node == dst:
            yield route
            continue
        for nxt, link in topology.neighbors(node):
            if link.id in banned_links or nxt in route:
                continue
            stack.append((nxt, route + (nxt,)))


def path_cost(topology: Topology, route, edge_cost) -> float:
    total = 0.0
    for u, v in zip(route, route[1:]):
        total = total + edge_cost(topology.link_between(u, v), u, v)
    return total


def min_cost_route(topology: Topology, src: int, dst: int, edge_cost):
    """Exhaustive minimum by (cost, hops, route) — mirrors the tie-break."""
    best = None
    for route in simple_paths(topology, src, dst):
        cost = path_cost(topology, route, edge_cost)
        if cost == float("inf"):
            continue
        key = (cost, len(route) - 1, route)
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return best[2], best[0]


def k_best_disjoint(topology: Topology, src: int, dst: int, primary_links, k: int):
    """All loop-free paths avoiding primary_links, k best by (hops, route)."""
    found = sorted(
        simple_paths(topology, src, dst, banned_links=frozenset(primary_links)),
        key=lambda r: (len(r), r),
    )
    return found[:k]


def random_topology(rng: random.Random, max_nodes: int = 8) -> Topology:
    """Random connected-ish multigraph-free topology with random occupancy."""
    n = rng.randint(2, max_nodes)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    rng.shuffle(pairs)
    # a random spanning tree keeps most instances connected, then extra chords
    k_extra = rng.randint(0, len(pairs) // 2)
    chosen = set()
    seen = {0}
    for a, b in pairs:
        if (a in seen) != (b in seen):
            chosen.add((a, b))
            seen.update((a, b))
    for a, b in pairs:
        if len(chosen) >= len(seen) - 1 + k_extra:
            break
        chosen.add((a, b))
    links = [
        Link(i, a, b, delay=rng.choice([0.005, 0.01, 0.02]),
             total_channels=rng.randint(1, 4))
        for i, (a, b) in enumerate(sorted(chosen))
    ]
    topology = Topology(n, links)
    for link in topology.links:
        for lane in (0, 1):
            for w in range(link.total_channels):
                if rng.random() < 0.4:
                    link.occupy(lane, w, owner=-(link.id * 100 + lane * 10 + w + 1))
        if rng.random() < 0.1:
            set_link_state(link, up=False)
    return topology
