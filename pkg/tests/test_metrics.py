import csv
import math
from types import SimpleNamespace

import pytest
from hypothesis import given, strategies as st

from wdmsim.metrics import (
    SUMMARY_COLUMNS,
    TIMESERIES_COLUMNS,
    MetricsCollector,
    MetricsReport,
    blocking_probability,
    end_to_end_delay,
    export_csv,
    packets_for,
    sample_utilization,
    summary_row,
    write_summary_csv,
    write_timeseries_csv,
)
from wdmsim.routing import establish_lightpath
from wdmsim.topology import FORWARD, parse_topology, set_link_state

MODEL = SimpleNamespace(data_rate=2e6, packet_size=200, arrival_rate=0.5,
                        mean_holding=0.2, num_sources=4)


def conn(state="completed", arrival=0.0, holding=0.2, drop_time=None):
    return SimpleNamespace(id=1, state=state, arrival=arrival, holding=holding,
                           drop_time=drop_time)


# -- per-connection arithmetic ------------------------------------------------

def test_packet_count_for_whole_holding():
    # 2 Mb/s for 0.2 s in 1600-bit packets: exactly 250
    assert packets_for(conn(), MODEL) == 250


def test_packet_count_floors_partial_packets():
    assert packets_for(conn(holding=0.2001), MODEL) == 250
    assert packets_for(conn(holding=0.1999), MODEL) == 249


def test_blocked_connection_carries_nothing():
    assert packets_for(conn(state="blocked"), MODEL) == 0


def test_dropped_connection_counts_time_before_failure():
    c = conn(state="dropped", arrival=1.0, holding=5.0, drop_time=1.1)
    # only 0.1 s carried: floor(2e6 * 0.1 / 1600) = 125
    assert packets_for(c, MODEL) == 125


@given(st.floats(0.0, 100.0), st.integers(1, 10**7))
def test_packet_count_nonnegative_and_monotone(holding, rate):
    model = SimpleNamespace(data_rate=float(rate), packet_size=200)
    n = packets_for(conn(holding=holding), model)
    assert n >= 0
    assert n <= packets_for(conn(holding=holding + 1.0), model)


def test_blocking_probability_ratio():
    report = MetricsReport(scenario="s", seed=0, router="rftr", rate_mbps=2.0,
                           sources=4, offered=50, blocked=7)
    assert blocking_probability(report) == 7 / 50
    report.offered = 0
    with pytest.raises(ValueError):
        blocking_probability(report)


def test_end_to_end_delay_recomputed_from_links(square):
    lp, _ = establish_lightpath(square, [0, 1, 2], "none", 0.024)
    assert end_to_end_delay(square, lp, 0.024) == pytest.approx(0.020)


def test_end_to_end_delay_charges_conversion():
    topo = parse_topology("nodes 3\nlink 0 1 10 2\nlink 1 2 10 2\n")
    topo.links[0].occupy(FORWARD, 0, owner=-1)
    topo.links[1].occupy(FORWARD, 1, owner=-2)
    lp, _ = establish_lightpath(topo, [0, 1, 2], "full", 0.024)
    assert end_to_end_delay(topo, lp, 0.024) == pytest.approx(0.044)


# -- utilization sampling -----------------------------------------------------

def test_utilization_counts_both_lanes(square):
    assert sample_utilization(square, 1.0) == (1.0, 0.0)
    establish_lightpath(square, [0, 1, 2], "none", 0.024)
    t, u = sample_utilization(square, 2.0)
    assert (t, u) == (2.0, 2 / 64)


def test_utilization_ignores_down_links(square):
    establish_lightpath(square, [0, 1], "none", 0.024)
    set_link_state(square.links[0], up=False)
    _, u = sample_utilization(square, 1.0)
    assert u == 0.0  # the only occupied link no longer counts


# -- collector lifecycle ------------------------------------------------------

def test_delay_is_duration_weighted_across_restoration():
    collector = MetricsCollector(MODEL)
    c = conn(state="completed", holding=10.0)
    collector.on_offered()
    collector.on_accepted(c, setup_delay=0.02, path_delay=0.02, now=0.0)
    # 4 s on a 0.02 s path, then 6 s on a 0.05 s restoration path
    collector.on_restored(c, new_path_delay=0.05, now=4.0)
    collector.on_completed(c, now=10.0)
    report = collector.finalize("s", 0, "rftr", 2.0, 4)
    assert report.mean_delay == pytest.approx((0.02 * 4 + 0.05 * 6) / 10)
    assert report.restored == 1
    assert report.completed == 1


def test_restoring_twice_counts_once():
    collector = MetricsCollector(MODEL)
    c = conn(holding=9.0)
    collector.on_offered()
    collector.on_accepted(c, 0.02, 0.02, now=0.0)
    collector.on_restored(c, 0.03, now=1.0)
    collector.on_restored(c, 0.04, now=2.0)
    collector.on_completed(c, now=9.0)
    assert collector.finalize("s", 0, "rftr", 2.0, 4).restored == 1


def test_sample_series_tracks_running_counters(square):
    collector = MetricsCollector(MODEL)
    collector.on_sample(square, 0.5)
    collector.on_offered()
    collector.on_blocked()
    collector.on_sample(square, 1.0)
    report = collector.finalize("s", 0, "rftr", 2.0, 4)
    assert report.series[0] == (0.5, 0.0, 0, 0.0)
    assert report.series[1] == (1.0, 1.0, 0, 0.0)
    assert report.utilization_series == [(0.5, 0.0), (1.0, 0.0)]
    assert report.mean_utilization == 0.0


def test_probe_counters():
    collector = MetricsCollector(MODEL)
    for _ in range(5):
        collector.on_probe_sent()
    collector.on_probe_feedback("pack")
    collector.on_probe_feedback("nack")
    collector.on_probe_feedback("nack")
    report = collector.finalize("s", 0, "rftr", 2.0, 4)
    assert (report.probes_sent, report.probe_packs, report.probe_nacks) == (5, 1, 2)


def test_empty_run_finalizes_with_defaults():
    report = MetricsCollector(MODEL).finalize("s", 0, "rftr", 2.0, 4)
    assert report.blocking_probability == 0.0
    assert report.mean_delay == 0.0
    assert report.mean_utilization == 0.0
    assert report.packets_received == 0


# -- CSV shape ----------------------------------------------------------------

def finished_report():
    collector = MetricsCollector(MODEL)
    c = conn(holding=0.2)
    collector.on_offered()
    collector.on_accepted(c, 0.02, 0.02, now=0.0)
    collector.on_completed(c, now=0.2)
    return collector.finalize("demo", 3, "rftr", 2.0, 4)


def test_summary_csv_layout(tmp_path):
    path = tmp_path / "summary.csv"
    write_summary_csv([summary_row(finished_report())], path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == SUMMARY_COLUMNS
    assert len(rows) == 2
    row = dict(zip(rows[0], rows[1]))
    assert row["scenario"] == "demo"
    assert row["seed"] == "3"
    assert row["packets_received"] == "250"
    assert row["n_seeds"] == "1"


def test_timeseries_csv_layout(tmp_path):
    report = finished_report()
    report.series = [(0.5, 0.0, 100, 0.25), (1.0, 0.1, 250, 0.125)]
    path = tmp_path / "ts.csv"
    write_timeseries_csv(report, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == TIMESERIES_COLUMNS
    assert rows[1] == ["0.5", "0.0", "100", "0.25"]
    assert rows[2] == ["1.0", "0.1", "250", "0.125"]


def test_export_csv_single_row(tmp_path):
    path = tmp_path / "run.csv"
    export_csv(finished_report(), path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == SUMMARY_COLUMNS
    assert len(rows) == 2


def test_csv_bytes_are_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(finished_report(), a)
    export_csv(finished_report(), b)
    assert a.read_bytes() == b.read_bytes()
