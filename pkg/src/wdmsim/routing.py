"""Primary lightpath computation: threshold link costs, Dijkstra, wavelength fit.

The cost of traversing a link depends on its load index LI (fraction of free
channels in the travel lane):

    cost = 1 - LI    if LI > LT
    cost = 1 + LI    if 0 < LI <= LT
    cost = infinity  if LI = 0

where LT is a configurable load threshold.  The piecewise form is kept
branch-for-branch as given, including the jump at LI = LT.  A saturated or
down lane is unusable, so a demand whose every route crosses such a lane is
blocked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappop, heappush

from .errors import LinkDownError, NoSuchNodeError
from .topology import Link, Topology

NO_CONVERSION = "none"
FULL_CONVERSION = "full"
CONVERSION_MODES = (NO_CONVERSION, FULL_CONVERSION)

PRIMARY = "primary"
BACKUP = "backup"


@dataclass(frozen=True)
class CostParams:
    """Routing cost knobs; ``load_threshold`` is the LT breakpoint."""

    load_threshold: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.load_threshold < 1.0:
            raise ValueError(f"load_threshold must be in (0,1), got {self.load_threshold}")


def link_cost(load_index: float, params: CostParams) -> float:
    lt = params.load_threshold
    if load_index > lt:
        return 1.0 - load_index
    if load_index > 0.0:
        return 1.0 + load_index
    return math.inf


def loaded_edge_cost(params: CostParams):
    """Edge-cost function over the current channel state."""

    def cost(link: Link, u: int, v: int) -> float:
        return link_cost(link.load_index(link.lane(u, v)), params)

    return cost


def unit_edge_cost(link: Link, u: int, v: int) -> float:
    """Hop-count costs for the baseline router; down links are unusable."""
    return 1.0 if link.up else math.inf


def least_cost_path(
    topology: Topology,
    src: int,
    dst: int,
    edge_cost,
    banned_links: frozenset[int] = frozenset(),
    banned_nodes: frozenset[int] = frozenset(),
) -> tuple[list[int], float] | None:
    """Dijkstra over ``edge_cost(link, u, v)`` with a total, deterministic order.

    Ties on total cost break by fewer hops, then by lexicographically
    smallest node sequence.  Returns (route, cost) or None when no
    finite-cost route exists.
    """
    for n in (src, dst):
        if not topology.has_node(n):
            raise NoSuchNodeError(f"node {n} not in topology")
    if src == dst:
        raise ValueError("src and dst must differ")
    # priority = (cost, hops, route); route extension preserves the order
    # because compared routes are loop-free and never prefixes of each other
    heap: list[tuple[float, int, tuple[int, ...]]] = [(0.0, 0, (src,))]
    best: dict[int, tuple[float, int, tuple[int, ...]]] = {src: (0.0, 0, (src,))}
    done: set[int] = set()
    while heap:
        cost, hops, route = heappop(heap)
        u = route[-1]
        if u in done:
            continue
        done.add(u)
        if u == dst:
            return list(route), cost
        for v, link in topology.neighbors(u):
            if v in done or v in banned_nodes or link.id in banned_links:
                continue
            c = edge_cost(link, u, v)
            if math.isinf(c):
                continue
            candidate = (cost + c, hops + 1, route + (v,))
            known = best.get(v)
            if known is None or candidate < known:
                best[v] = candidate
                heappush(heap, candidate)
    return None


def compute_primary(
    topology: Topology, src: int, dst: int, params: CostParams
) -> tuple[list[int], float] | None:
    """Least-cost route under threshold costs, or None when the demand blocks."""
    return least_cost_path(topology, src, dst, loaded_edge_cost(params))


def assign_wavelength(
    topology: Topology, route: list[int], mode: str = NO_CONVERSION
) -> list[int] | None:
    """First-fit wavelength assignment along ``route``.

    Without conversion every hop must share one wavelength (continuity);
    with full conversion each hop independently takes its lowest free index.
    Returns the per-hop wavelength list, or None when no assignment exists.
    """
    if mode not in CONVERSION_MODES:
        raise ValueError(f"unknown conversion mode {mode!r}")
    hops = topology.hops(route)
    for link, _ in hops:
        if not link.up:
            raise LinkDownError(f"link {link.id} on route {route} is down")
    if mode == NO_CONVERSION:
        common = set(range(hops[0][0].total_channels)) if hops else set()
        for link, lane in hops:
            common &= set(link.free_indices(lane))
        if not common:
            return None
        w = min(common)
        return [w] * len(hops)
    wavelengths = []
    for link, lane in hops:
        free = link.free_indices(lane)
        if not free:
            return None
        wavelengths.append(free[0])
    return wavelengths


@dataclass
class Lightpath:
    """An established route with its per-hop wavelength claims."""

    id: int
    route: list[int]
    wavelengths: list[int]
    role: str = PRIMARY
    claims: list[tuple[int, int, int]] = field(default_factory=list)  # (link_id, lane, w)
    path_delay: float = 0.0  # propagation plus conversion charges

    @property
    def link_ids(self) -> list[int]:
        return [link_id for link_id, _, _ in self.claims]

    def wavelength_changes(self) -> int:
        return sum(1 for prev, cur in zip(self.wavelengths, self.wavelengths[1:]) if prev != cur)


@dataclass
class RouteResult:
    lightpath: Lightpath | None
    total_cost: float
    setup_delay: float

    @property
    def blocked(self) -> bool:
        return self.lightpath is None


def establish_lightpath(
    topology: Topology,
    route: list[int],
    mode: str,
    conversion_time: float,
    role: str = PRIMARY,
    lp_id: int | None = None,
) -> tuple[Lightpath, float] | None:
    """Assign wavelengths and occupy channels atomically along ``route``.

    Returns (lightpath, setup_delay) or None when no wavelength fits; in
    that case the occupancy map is left untouched.
    """
    wavelengths = assign_wavelength(topology, route, mode)
    if wavelengths is None:
        return None
    hops = topology.hops(route)
    if lp_id is None:
        lp_id = topology.next_lightpath_id()
    lp = Lightpath(id=lp_id, route=list(route), wavelengths=wavelengths, role=role)
    for (link, lane), w in zip(hops, wavelengths):
        link.occupy(lane, w, lp_id)
        lp.claims.append((link.id, lane, w))
    changes = lp.wavelength_changes()
    setup_delay = sum(link.delay for link, _ in hops) + conversion_time * changes
    lp.path_delay = setup_delay
    return lp, setup_delay


def release_lightpath(topology: Topology, lp: Lightpath) -> None:
    for link_id, lane, w in lp.claims:
        topology.links[link_id].release(lane, w, lp.id)
    lp.claims = []


def establish_primary(
    topology: Topology,
    src: int,
    dst: int,
    params: CostParams,
    mode: str = NO_CONVERSION,
    conversion_time: float = 0.024,
    role: str = PRIMARY,
) -> RouteResult:
    """Threshold-cost route selection plus atomic channel occupation."""
    found = compute_primary(topology, src, dst, params)
    if found is None:
        return RouteResult(None, math.inf, 0.0)
    route, cost = found
    established = establish_lightpath(topology, route, mode, conversion_time, role)
    if established is None:
        return RouteResult(None, cost, 0.0)
    lp, setup_delay = established
    return RouteResult(lp, cost, setup_delay)


def establish_baseline(
    topology: Topology,
    src: int,
    dst: int,
    mode: str = NO_CONVERSION,
    conversion_time: float = 0.024,
    role: str = PRIMARY,
) -> RouteResult:
    """Shortest-hop reference router sharing the assignment machinery."""
    found = least_cost_path(topology, src, dst, unit_edge_cost)
    if found is None:
        return RouteResult(None, math.inf, 0.0)
    route, cost = found
    established = establish_lightpath(topology, route, mode, conversion_time, role)
    if established is None:
        return RouteResult(None, cost, 0.0)
    lp, setup_delay = established
    return RouteResult(lp, cost, setup_delay)
