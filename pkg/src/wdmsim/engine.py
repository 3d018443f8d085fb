"""Deterministic discrete-event core: traffic, lifecycle, failures, orchestration.

Every run is driven by a single seeded RNG consumed only while pre-generating
the arrival sequence, so identical (config, seed) pairs replay bit-identically.
Events dequeue in (time, insertion seq) order, which makes simultaneous events
deterministic too.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field

from . import metrics as metrics_mod
from .errors import ConfigError
from .probing import ConnectionProber, ProbePolicy, candidate_paths, probe_outcome, reroute
from .routing import (
    CONVERSION_MODES,
    NO_CONVERSION,
    CostParams,
    Lightpath,
    establish_baseline,
    establish_primary,
    release_lightpath,
)
from .topology import Topology, default_topology, read_topology, set_link_state

# event kinds
ARRIVAL = "arrival"
DEPARTURE = "departure"
PROBE_SEND = "probe_send"
FEEDBACK_ARRIVE = "feedback_arrive"
LINK_FAILURE = "link_failure"
LINK_REPAIR = "link_repair"
SAMPLE_TICK = "sample_tick"
PROBE_WINDOW = "probe_window"  # window rollover heartbeat, one per connection

# connection states
ACTIVE = "active"
BLOCKED = "blocked"
RESTORED = "restored"
DROPPED = "dropped"
COMPLETED = "completed"

ROUTER_RFTR = "rftr"
ROUTER_BASELINE = "baseline"


@dataclass
class Event:
    time: float
    seq: int
    kind: str
    src: int | None = None
    dst: int | None = None
    holding: float | None = None
    conn_id: int | None = None
    path_index: int | None = None
    probe_seq: int | None = None
    outcome: str | None = None
    link_id: int | None = None


@dataclass
class Connection:
    id: int
    src: int
    dst: int
    arrival: float
    holding: float
    state: str = ACTIVE
    primary: Lightpath | None = None
    current: Lightpath | None = None
    backups: list[tuple[int, ...]] = field(default_factory=list)
    prober: ConnectionProber | None = None
    drop_time: float | None = None


@dataclass
class TrafficModel:
    arrival_rate: float = 0.5  # calls/second per source
    mean_holding: float = 0.2  # seconds
    num_sources: int = 4
    packet_size: int = 200  # bytes
    data_rate: float = 2e6  # bits/second per session

    @property
    def aggregate_rate(self) -> float:
        return self.arrival_rate * self.num_sources


@dataclass
class SimConfig:
    topology_file: str | None = None
    wavelengths: int = 8
    link_delay_ms: float = 10.0
    load_threshold: float = 0.3
    conversion_mode: str = NO_CONVERSION
    conversion_time: float = 0.024
    arrival_rate: float = 0.5
    holding_time: float = 0.2
    session_traffics: int = 4
    packet_size: int = 200
    data_rate_mbps: float = 2.0
    max_requests: int = 50
    sample_interval: float = 0.5
    candidates_k: int = 3
    backups_m: int | None = None
    probes_per_interval: int = 10
    probe_interval: float = 0.5
    adaptive_scale: float = 0.0
    router: str = ROUTER_RFTR
    seed: int = 0
    failures: list[tuple[float, int]] = field(default_factory=list)
    repairs: list[tuple[float, int]] = field(default_factory=list)
    # accepted and recorded only; no modelled effect
    wavelength_conversion_factor: float = 1.0
    wavelength_conversion_distance: float = 8.0

    def validate(self) -> None:
        if self.max_requests < 1:
            raise ConfigError("max_requests must be >= 1")
        if self.sample_interval <= 0:
            raise ConfigError("sample_interval must be positive")
        if not 0.0 < self.load_threshold < 1.0:
            raise ConfigError(f"load_threshold must be in (0,1), got {self.load_threshold}")
        if self.conversion_mode not in CONVERSION_MODES:
            raise ConfigError(f"conversion_mode must be one of {CONVERSION_MODES}")
        if self.router not in (ROUTER_RFTR, ROUTER_BASELINE):
            raise ConfigError(f"router must be rftr or baseline, got {self.router!r}")
        if self.arrival_rate <= 0 or self.holding_time <= 0:
            raise ConfigError("arrival_rate and holding_time must be positive")
        if self.session_traffics < 1:
            raise ConfigError("session_traffics must be >= 1")
        if self.wavelengths < 1:
            raise ConfigError("wavelengths must be >= 1")
        if self.candidates_k < 1:
            raise ConfigError("candidates_k must be >= 1")
        if self.probes_per_interval < 1 or self.probe_interval <= 0 or self.adaptive_scale < 0:
            raise ConfigError("invalid probe policy parameters")
        if self.packet_size < 1 or self.data_rate_mbps <= 0:
            raise ConfigError("packet_size and data_rate_mbps must be positive")

    def traffic_model(self) -> TrafficModel:
        return TrafficModel(
            arrival_rate=self.arrival_rate,
            mean_holding=self.holding_time,
            num_sources=self.session_traffics,
            packet_size=self.packet_size,
            data_rate=self.data_rate_mbps * 1e6,
        )

    def cost_params(self) -> CostParams:
        return CostParams(load_threshold=self.load_threshold)

    def probe_policy(self) -> ProbePolicy:
        return ProbePolicy(
            probes_per_interval=self.probes_per_interval,
            update_interval=self.probe_interval,
            adaptive_scale=self.adaptive_scale,
        )


def build_topology(config: SimConfig) -> Topology:
    if config.topology_file:
        return read_topology(config.topology_file)
    return default_topology(channels=config.wavelengths, delay_ms=config.link_delay_ms)


def generate_arrivals(
    model: TrafficModel, rng: random.Random, max_requests: int, num_nodes: int
) -> list[tuple[float, int, int, float]]:
    """Pre-draw (time, src, dst, holding) for every demand.

    Interarrival gaps are exponential at the aggregate rate (the per-source
    generators superpose into one stream); endpoints are uniform over
    ordered pairs with src != dst; holding times are exponential.
    """
    if num_nodes < 2:
        raise ConfigError("need at least two nodes to generate traffic")
    arrivals = []
    now = 0.0
    rate = model.aggregate_rate
    for _ in range(max_requests):
        now += rng.expovariate(rate)
        src = rng.randrange(num_nodes)
        dst = rng.randrange(num_nodes - 1)
        if dst >= src:
            dst += 1
        holding = rng.expovariate(1.0 / model.mean_holding)
        arrivals.append((now, src, dst, holding))
    return arrivals


def random_failure_schedule(
    topology: Topology, seed: int, tmax: float, count: int = 1
) -> list[tuple[float, int]]:
    """Seeded helper for reproducible single/multi link-failure schedules."""
    rng = random.Random(seed ^ 0xFA11)
    schedule = []
    for _ in range(count):
        t = rng.uniform(0.0, tmax)
        link = rng.randrange(len(topology.links))
        schedule.append((t, link))
    return sorted(schedule)


class Simulation:
    """Single-threaded event loop over one topology instance."""

    def __init__(self, config: SimConfig, topology: Topology | None = None, audit: bool = False):
        config.validate()
        self.config = config
        self.topology = topology if topology is not None else build_topology(config)
        self.audit = audit
        self.model = config.traffic_model()
        self.params = config.cost_params()
        self.policy = config.probe_policy()
        self.m = config.backups_m if config.backups_m is not None else config.candidates_k
        self.rng = random.Random(config.seed)
        self.now = 0.0
        self.connections: dict[int, Connection] = {}
        self.collector = metrics_mod.MetricsCollector(self.model)
        self._heap: list[tuple[float, int, Event]] = []
        self._eseq = itertools.count()
        self._cid = itertools.count()
        self._initial_occupancy = None
        # Pre-generated workload, exposed so scripted scenarios can pin
        # endpoints or holding times while keeping the seeded arrival clock.
        self.arrivals = generate_arrivals(
            self.model, self.rng, config.max_requests, self.topology.num_nodes
        )

    # -- scheduling ---------------------------------------------------------

    def schedule(self, time: float, kind: str, **payload) -> None:
        event = Event(time=time, seq=next(self._eseq), kind=kind, **payload)
        heapq.heappush(self._heap, (event.time, event.seq, event))

    # -- run ----------------------------------------------------------------

    def run(self) -> metrics_mod.MetricsReport:
        self._initial_occupancy = self.topology.occupancy_snapshot()
        for t, src, dst, holding in self.arrivals:
            self.schedule(t, ARRIVAL, src=src, dst=dst, holding=holding)
        for t, link_id in self.config.failures:
            self._check_link_id(link_id)
            self.schedule(t, LINK_FAILURE, link_id=link_id)
        for t, link_id in self.config.repairs:
            self._check_link_id(link_id)
            self.schedule(t, LINK_REPAIR, link_id=link_id)
        self.schedule(self.config.sample_interval, SAMPLE_TICK)

        while self._heap:
            _, _, event = heapq.heappop(self._heap)
            assert event.time >= self.now - 1e-12, "event clock went backwards"
            self.now = max(self.now, event.time)
            self._dispatch(event)

        if self.audit:
            assert self.topology.occupancy_snapshot() == self._initial_occupancy, (
                "channel leak: occupancy differs from the pre-run state"
            )
        report = self.collector.finalize(
            scenario="",
            seed=self.config.seed,
            router=self.config.router,
            rate_mbps=self.config.data_rate_mbps,
            sources=self.config.session_traffics,
        )
        return report

    def _check_link_id(self, link_id: int) -> None:
        if not 0 <= link_id < len(self.topology.links):
            raise ConfigError(f"unknown link {link_id} in failure schedule")

    # -- dispatch -----------------------------------------------------------

    def _dispatch(self, event: Event) -> None:
        if event.kind == ARRIVAL:
            self._on_arrival(event)
        elif event.kind == DEPARTURE:
            self._on_departure(event)
        elif event.kind == PROBE_SEND:
            self._on_probe_send(event)
        elif event.kind == FEEDBACK_ARRIVE:
            self._on_feedback(event)
        elif event.kind == LINK_FAILURE:
            self._on_link_failure(event)
        elif event.kind == LINK_REPAIR:
            set_link_state(self.topology.links[event.link_id], True)
        elif event.kind == SAMPLE_TICK:
            self._on_sample_tick(event)
        elif event.kind == PROBE_WINDOW:
            self._on_probe_window(event)
        else:
            raise AssertionError(f"unknown event kind {event.kind}")

    def _establish(self, src: int, dst: int, role: str = "primary"):
        if self.config.router == ROUTER_RFTR:
            return establish_primary(
                self.topology,
                src,
                dst,
                self.params,
                mode=self.config.conversion_mode,
                conversion_time=self.config.conversion_time,
                role=role,
            )
        return establish_baseline(
            self.topology,
            src,
            dst,
            mode=self.config.conversion_mode,
            conversion_time=self.config.conversion_time,
            role=role,
        )

    def _on_arrival(self, event: Event) -> None:
        conn = Connection(
            id=next(self._cid),
            src=event.src,
            dst=event.dst,
            arrival=self.now,
            holding=event.holding,
        )
        self.connections[conn.id] = conn
        self.collector.on_offered()
        result = self._establish(conn.src, conn.dst)
        if result.blocked:
            conn.state = BLOCKED
            self.collector.on_blocked()
            return
        conn.state = ACTIVE
        conn.primary = conn.current = result.lightpath
        self._assert_continuity(result.lightpath)
        self.collector.on_accepted(conn, result.setup_delay, result.lightpath.path_delay, self.now)
        self.schedule(self.now + conn.holding, DEPARTURE, conn_id=conn.id)
        cands = candidate_paths(
            self.topology, conn.src, conn.dst, result.lightpath, self.config.candidates_k
        )
        conn.backups = list(cands.paths[: self.m])
        if self.config.router == ROUTER_RFTR and cands.paths:
            conn.prober = ConnectionProber(cands, self.policy, self.m)
            self._open_probe_window(conn)

    def _open_probe_window(self, conn: Connection) -> None:
        sends = conn.prober.open_windows(self.now, self.model.aggregate_rate)
        for t, path_index, seq in sends:
            self.schedule(t, PROBE_SEND, conn_id=conn.id, path_index=path_index, probe_seq=seq)
        self.schedule(self.now + self.policy.update_interval, PROBE_WINDOW, conn_id=conn.id)

    def _alive(self, conn_id: int) -> Connection | None:
        conn = self.connections.get(conn_id)
        if conn is None or conn.state not in (ACTIVE, RESTORED):
            return None
        return conn

    def _on_probe_send(self, event: Event) -> None:
        conn = self._alive(event.conn_id)
        if conn is None or conn.prober is None:
            return  # stale: session ended before the probe went out
        route = conn.prober.candidates.paths[event.path_index]
        outcome = probe_outcome(self.topology, route, self.config.conversion_mode)
        self.collector.on_probe_sent()
        rtt = 2.0 * sum(link.delay for link, _ in self.topology.hops(route))
        self.schedule(
            self.now + rtt,
            FEEDBACK_ARRIVE,
            conn_id=event.conn_id,
            path_index=event.path_index,
            probe_seq=event.probe_seq,
            outcome=outcome,
        )

    def _on_feedback(self, event: Event) -> None:
        conn = self._alive(event.conn_id)
        if conn is None or conn.prober is None:
            return
        conn.prober.feedback(event.path_index, event.probe_seq, event.outcome)
        self.collector.on_probe_feedback(event.outcome)

    def _on_probe_window(self, event: Event) -> None:
        conn = self._alive(event.conn_id)
        if conn is None or conn.prober is None:
            return
        conn.backups = conn.prober.close_and_rank()
        self._open_probe_window(conn)

    def _on_departure(self, event: Event) -> None:
        conn = self.connections.get(event.conn_id)
        if conn is None or conn.state not in (ACTIVE, RESTORED):
            return  # stale departure for a dropped session
        release_lightpath(self.topology, conn.current)
        conn.state = COMPLETED
        conn.prober = None
        self.collector.on_completed(conn, self.now)

    def _on_link_failure(self, event: Event) -> None:
        link = self.topology.links[event.link_id]
        set_link_state(link, False)
        affected = [
            conn
            for conn in self.connections.values()
            if conn.state in (ACTIVE, RESTORED)
            and conn.current is not None
            and link.id in conn.current.link_ids
        ]
        affected.sort(key=lambda c: c.id)
        # release every broken lightpath first so peers can reuse the capacity
        for conn in affected:
            release_lightpath(self.topology, conn.current)
        for conn in affected:
            new_lp = reroute(
                self.topology,
                conn,
                conn.backups,
                self.config.conversion_mode,
                self.config.conversion_time,
                fallback_establish=lambda role, c=conn: self._establish(c.src, c.dst, role=role),
            )
            if new_lp is None:
                conn.state = DROPPED
                conn.current = None
                conn.drop_time = self.now
                conn.prober = None
                self.collector.on_dropped(conn, self.now)
            else:
                conn.state = RESTORED
                conn.current = new_lp
                self._assert_continuity(new_lp)
                self.collector.on_restored(conn, new_lp.path_delay, self.now)
        if self.audit:
            self._assert_failure_safety()

    def _on_sample_tick(self, event: Event) -> None:
        self.collector.on_sample(self.topology, self.now)
        if self._heap:
            self.schedule(self.now + self.config.sample_interval, SAMPLE_TICK)

    # -- invariant checks ---------------------------------------------------

    def _assert_continuity(self, lp: Lightpath) -> None:
        if self.config.conversion_mode == NO_CONVERSION and lp.wavelengths:
            assert len(set(lp.wavelengths)) == 1, "wavelength continuity violated"

    def _assert_failure_safety(self) -> None:
        down = {l.id for l in self.topology.links if not l.up}
        for conn in self.connections.values():
            if conn.state in (ACTIVE, RESTORED) and conn.current is not None:
                assert not (down & set(conn.current.link_ids)), (
                    f"connection {conn.id} rides a down link"
                )


def run(
    config: SimConfig, topology: Topology | None = None, audit: bool = False
) -> metrics_mod.MetricsReport:
    """Execute one simulation run to completion and return its report."""
    return Simulation(config, topology=topology, audit=audit).run()
