"""Run metrics: demand blocking, payload throughput, delay, channel utilization.

Definitions used throughout:

* blocking probability — rejected demands over offered demands;
* throughput — payload packets delivered by accepted sessions (probe
  traffic is tallied separately and never mixed in);
* end-to-end delay — propagation plus wavelength-conversion time of the
  carrying path, recomputed when restoration moves the connection;
* channel utilization — occupied fraction of all channels on up links,
  sampled on a fixed interval.

Restoration is instantaneous in this model, so a restored session carries
traffic for its whole holding time; a dropped session carries only up to
the failure instant.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .topology import Topology


@dataclass
class MetricsReport:
    scenario: str = ""
    seed: int = 0
    router: str = "rftr"
    rate_mbps: float = 0.0
    sources: int = 0
    offered: int = 0
    accepted: int = 0
    blocked: int = 0
    completed: int = 0
    restored: int = 0
    dropped: int = 0
    blocking_probability: float = 0.0
    packets_received: int = 0
    mean_delay: float = 0.0
    mean_setup_delay: float = 0.0
    mean_utilization: float = 0.0
    probes_sent: int = 0
    probe_packs: int = 0
    probe_nacks: int = 0
    utilization_series: list[tuple[float, float]] = field(default_factory=list)
    # (time, blocking_probability_so_far, cumulative_packets, utilization)
    series: list[tuple[float, float, int, float]] = field(default_factory=list)


def blocking_probability(report: MetricsReport) -> float:
    if report.offered <= 0:
        raise ValueError("blocking probability undefined with zero offered demands")
    return report.blocked / report.offered


def packets_for(connection, model) -> int:
    """Payload packets delivered over the connection's carried duration."""
    if connection.state == "blocked":
        return 0
    if connection.state == "dropped":
        carried = connection.drop_time - connection.arrival
    else:
        carried = connection.holding
    return int(model.data_rate * carried // (model.packet_size * 8))


def end_to_end_delay(topology: Topology, lightpath, conversion_time: float) -> float:
    """Recompute propagation + conversion delay of a path from the topology."""
    hops = topology.hops(lightpath.route)
    return sum(link.delay for link, _ in hops) + conversion_time * lightpath.wavelength_changes()


def sample_utilization(topology: Topology, now: float) -> tuple[float, float]:
    total = topology.total_channel_count(up_only=True)
    if total == 0:
        return (now, 0.0)
    return (now, topology.occupied_channel_count(up_only=True) / total)


class MetricsCollector:
    """Accumulates lifecycle events from the simulation into a report."""

    def __init__(self, model):
        self.model = model
        self.offered = 0
        self.accepted = 0
        self.blocked = 0
        self.completed = 0
        self.dropped = 0
        self.restored_ids: set[int] = set()
        self.packets = 0
        self.probes_sent = 0
        self.probe_packs = 0
        self.probe_nacks = 0
        self.setup_delay_sum = 0.0
        self.delay_weighted_sum = 0.0
        self.carried_duration_sum = 0.0
        self.series: list[tuple[float, float, int, float]] = []
        self._epochs: dict[int, tuple[float, float]] = {}  # conn id -> (delay, start)

    def on_offered(self):
        self.offered += 1

    def on_blocked(self):
        self.blocked += 1

    def on_accepted(self, conn, setup_delay: float, path_delay: float, now: float):
        self.accepted += 1
        self.setup_delay_sum += setup_delay
        self._epochs[conn.id] = (path_delay, now)

    def on_restored(self, conn, new_path_delay: float, now: float):
        self._close_epoch(conn.id, now)
        self._epochs[conn.id] = (new_path_delay, now)
        self.restored_ids.add(conn.id)

    def on_completed(self, conn, now: float):
        self.completed += 1
        self._close_epoch(conn.id, now)
        self.packets += packets_for(conn, self.model)

    def on_dropped(self, conn, now: float):
        self.dropped += 1
        self._close_epoch(conn.id, now)
        self.packets += packets_for(conn, self.model)

    def on_probe_sent(self):
        self.probes_sent += 1

    def on_probe_feedback(self, outcome: str):
        if outcome == "pack":
            self.probe_packs += 1
        else:
            self.probe_nacks += 1

    def on_sample(self, topology: Topology, now: float):
        _, utilization = sample_utilization(topology, now)
        bp = self.blocked / self.offered if self.offered else 0.0
        self.series.append((now, bp, self.packets, utilization))

    def _close_epoch(self, conn_id: int, now: float):
        delay, start = self._epochs.pop(conn_id)
        duration = now - start
        self.delay_weighted_sum += delay * duration
        self.carried_duration_sum += duration

    def finalize(self, scenario: str, seed: int, router: str, rate_mbps: float, sources: int) -> MetricsReport:
        report = MetricsReport(
            scenario=scenario,
            seed=seed,
            router=router,
            rate_mbps=rate_mbps,
            sources=sources,
            offered=self.offered,
            accepted=self.accepted,
            blocked=self.blocked,
            completed=self.completed,
            restored=len(self.restored_ids),
            dropped=self.dropped,
            packets_received=self.packets,
            probes_sent=self.probes_sent,
            probe_packs=self.probe_packs,
            probe_nacks=self.probe_nacks,
            series=list(self.series),
            utilization_series=[(t, u) for t, _, _, u in self.series],
        )
        report.blocking_probability = blocking_probability(report) if report.offered else 0.0
        if self.carried_duration_sum > 0:
            report.mean_delay = self.delay_weighted_sum / self.carried_duration_sum
        if report.accepted:
            report.mean_setup_delay = self.setup_delay_sum / report.accepted
        if report.utilization_series:
            report.mean_utilization = sum(u for _, u in report.utilization_series) / len(
                report.utilization_series
            )
        return report


SUMMARY_COLUMNS = [
    "scenario",
    "router",
    "seed",
    "rate_mbps",
    "sources",
    "blocking_probability",
    "packets_received",
    "mean_delay",
    "mean_utilization",
    "mean_setup_delay",
    "probes_sent",
    "probe_packs",
    "probe_nacks",
    "offered",
    "accepted",
    "blocked",
    "completed",
    "restored",
    "dropped",
    "n_seeds",
]

TIMESERIES_COLUMNS = ["time", "blocking_probability_so_far", "cumulative_packets", "utilization"]


def summary_row(report: MetricsReport, n_seeds: int = 1) -> dict:
    return {
        "scenario": report.scenario,
        "router": report.router,
        "seed": report.seed,
        "rate_mbps": report.rate_mbps,
        "sources": report.sources,
        "blocking_probability": report.blocking_probability,
        "packets_received": report.packets_received,
        "mean_delay": report.mean_delay,
        "mean_utilization": report.mean_utilization,
        "mean_setup_delay": report.mean_setup_delay,
        "probes_sent": report.probes_sent,
        "probe_packs": report.probe_packs,
        "probe_nacks": report.probe_nacks,
        "offered": report.offered,
        "accepted": report.accepted,
        "blocked": report.blocked,
        "completed": report.completed,
        "restored": report.restored,
        "dropped": report.dropped,
        "n_seeds": n_seeds,
    }


def write_summary_csv(rows: list[dict], destination) -> None:
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_timeseries_csv(report: MetricsReport, destination) -> None:
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMESERIES_COLUMNS)
        for t, bp, packets, utilization in report.series:
            writer.writerow([t, bp, packets, utilization])


def export_csv(report: MetricsReport, destination) -> None:
    """Single-run summary: header plus exactly one row."""
    write_summary_csv([summary_row(report)], destination)
