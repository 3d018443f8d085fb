"""Scenario files: ``key = value`` lines with ``#`` comments.

Unset keys fall back to the stock parameter set (8 wavelengths, 10 ms link
delay, 0.024 s conversion time, 0.5 s sample interval, 0.5 calls/s arrival
rate, 0.2 s holding time, 200-byte packets, 4 session traffics, 50 max
requests); unknown keys are rejected outright so typos cannot silently run
a different experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .engine import ROUTER_BASELINE, ROUTER_RFTR, SimConfig, build_topology
from .errors import ConfigError, TopologyError

SWEEP_NONE = "none"
SWEEP_RATE = "rate"
SWEEP_SOURCES = "sources"

ROUTER_BOTH = "both"

_ROUTER_ALIASES = {
    "rftr": ROUTER_RFTR,
    "baseline": ROUTER_BASELINE,
    "baseline-shortest-hop": ROUTER_BASELINE,
    "both": ROUTER_BOTH,
}

_INT_KEYS = {
    "wavelengths",
    "packet_size",
    "session_traffics",
    "max_requests",
    "candidates_k",
    "backups_m",
    "probes_per_interval",
    "seed",
}
_FLOAT_KEYS = {
    "link_delay_ms",
    "load_threshold",
    "conversion_time",
    "arrival_rate",
    "holding_time",
    "data_rate_mbps",
    "sample_interval",
    "probe_interval",
    "adaptive_scale",
    "wavelength_conversion_factor",
    "wavelength_conversion_distance",
}
_STR_KEYS = {"name", "topology", "conversion_mode", "router"}
_LIST_KEYS = {"seeds", "sweep", "failures", "repairs"}

KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS


@dataclass
class Scenario:
    name: str = "scenario"
    base: SimConfig = field(default_factory=SimConfig)
    router: str = ROUTER_RFTR  # rftr | baseline | both
    sweep_param: str = SWEEP_NONE
    sweep_values: list[float] = field(default_factory=list)
    seeds: list[int] = field(default_factory=lambda: [0])

    def routers(self) -> list[str]:
        if self.router == ROUTER_BOTH:
            return [ROUTER_RFTR, ROUTER_BASELINE]
        return [self.router]

    def config_for(self, router: str, sweep_value: float | None, seed: int) -> SimConfig:
        cfg = replace(self.base, router=router, seed=seed)
        if self.sweep_param == SWEEP_RATE and sweep_value is not None:
            cfg = replace(cfg, data_rate_mbps=float(sweep_value))
        elif self.sweep_param == SWEEP_SOURCES and sweep_value is not None:
            cfg = replace(cfg, session_traffics=int(sweep_value))
        return cfg

    def run_label(self, router: str, sweep_value: float | None, seed: int | None = None) -> str:
        parts = [self.name, router]
        if self.sweep_param != SWEEP_NONE and sweep_value is not None:
            parts.append(f"{self.sweep_param}{sweep_value:g}")
        if seed is not None:
            parts.append(f"seed{seed}")
        return "-".join(parts)


def _parse_number_list(value: str, key: str, cast):
    items = [p for chunk in value.split(",") for p in chunk.split()] if value else []
    if not items:
        raise ConfigError(f"{key}: empty value list")
    try:
        return [cast(p) for p in items]
    except ValueError:
        raise ConfigError(f"{key}: bad number in {value!r}") from None


def _parse_schedule(value: str, key: str) -> list[tuple[float, int]]:
    """``time:link`` pairs, comma separated, e.g. ``failures = 5.0:3, 7.5:0``."""
    entries = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            time_s, link_s = part.split(":")
            entries.append((float(time_s), int(link_s)))
        except ValueError:
            raise ConfigError(f"{key}: expected time:link, got {part!r}") from None
    return entries


def parse_config(text: str) -> Scenario:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        values[key] = value

    base_kwargs = {}
    for key, value in values.items():
        if key in _INT_KEYS:
            try:
                base_kwargs[key] = int(value)
            except ValueError:
                raise ConfigError(f"{key}: expected integer, got {value!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                base_kwargs[key] = float(value)
            except ValueError:
                raise ConfigError(f"{key}: expected number, got {value!r}") from None

    if "topology" in values:
        base_kwargs["topology_file"] = values["topology"]
    if "conversion_mode" in values:
        base_kwargs["conversion_mode"] = values["conversion_mode"]
    if "failures" in values:
        base_kwargs["failures"] = _parse_schedule(values["failures"], "failures")
    if "repairs" in values:
        base_kwargs["repairs"] = _parse_schedule(values["repairs"], "repairs")

    field_names = {f.name for f in fields(SimConfig)}
    router = ROUTER_RFTR
    if "router" in values:
        alias = values["router"].strip().lower()
        if alias not in _ROUTER_ALIASES:
            raise ConfigError(f"router: unknown value {values['router']!r}")
        router = _ROUTER_ALIASES[alias]
    base = SimConfig(**{k: v for k, v in base_kwargs.items() if k in field_names})
    if router != ROUTER_BOTH:
        base = replace(base, router=router)
    base.validate()

    scenario = Scenario(name=values.get("name", "scenario"), base=base, router=router)
    if "seeds" in values:
        scenario.seeds = _parse_number_list(values["seeds"], "seeds", int)
    elif "seed" in values:
        scenario.seeds = [base.seed]

    if "sweep" in values:
        parts = values["sweep"].split(None, 1)
        if parts[0] == SWEEP_NONE and len(parts) == 1:
            pass
        elif parts[0] in (SWEEP_RATE, SWEEP_SOURCES):
            if len(parts) != 2:
                raise ConfigError("sweep: missing value list")
            sweep_values = _parse_number_list(parts[1], "sweep", float)
            if any(b <= a for a, b in zip(sweep_values, sweep_values[1:])):
                raise ConfigError("sweep: values must be strictly increasing")
            if parts[0] == SWEEP_SOURCES and any(v != int(v) or v < 1 for v in sweep_values):
                raise ConfigError("sweep: sources values must be positive integers")
            scenario.sweep_param = parts[0]
            scenario.sweep_values = sweep_values
        else:
            raise ConfigError(f"sweep: unknown parameter {parts[0]!r}")
    return scenario


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str


def validate_scenario(scenario: Scenario) -> list[Diagnostic]:
    """Static checks without running: topology shape, schedules, connectivity."""
    diagnostics: list[Diagnostic] = []
    try:
        topology = build_topology(scenario.base)
    except (TopologyError, OSError) as err:
        diagnostics.append(Diagnostic("error", f"topology: {err}"))
        return diagnostics
    if not topology.is_connected():
        diagnostics.append(
            Diagnostic("warning", "topology is disconnected; most demands will block")
        )
    n_links = len(topology.links)
    for label, schedule in (("failures", scenario.base.failures), ("repairs", scenario.base.repairs)):
        for t, link_id in schedule:
            if not 0 <= link_id < n_links:
                diagnostics.append(Diagnostic("error", f"{label}: unknown link {link_id}"))
            if t < 0:
                diagnostics.append(Diagnostic("error", f"{label}: negative time {t}"))
    return diagnostics
