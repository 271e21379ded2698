"""Scenario configuration: schema, validation and YAML round-trip.

Schema (units are part of the key names)::

    topology:
      sensor_positions_m: [[0, 300], [300, 0]]
      sink_position_m: [0, 0]
      path_loss_exponent: -3          # applied as (d/d0)^exponent
      reference_distance_m: 1
      rayleigh_scale: 0.5
    radio:
      num_subchannels: 2
      bandwidth_hz: 180000            # per subchannel
      noise_psd_w_per_hz: 3.981e-21   # required
      packet_bytes: 600
      slot_duration_s: 1.0            # optional, default 1
    constraints:
      max_power_w: 1.0                # scalar or one value per sensor
      max_avg_aoi_slots: 4            # scalar or one value per sensor, each > 0.5
    controller:
      V: 100.0
    simulation:
      horizon_slots: 100000
      seed: 2021                      # unsigned 64-bit
    output:                           # optional
      trace: null
      summary: null
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from .channel import RadioConstants, Topology
from .optimizer import MAX_MAPS

_MISSING = object()


class ConfigError(ValueError):
    """Invalid scenario configuration; ``errors`` lists (field, message) pairs."""

    category = "config"

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{f}: {m}" for f, m in self.errors))


@dataclass(frozen=True)
class ScenarioConfig:
    topology: Topology
    constants: RadioConstants
    num_subchannels: int
    max_power_w: tuple[float, ...]
    max_avg_aoi: tuple[float, ...]
    V: float
    horizon_slots: int
    seed: int
    trace_output: Optional[str] = None
    summary_output: Optional[str] = None

    @property
    def num_sensors(self) -> int:
        return self.topology.num_sensors

    def with_(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _get(raw, path, errors, default=_MISSING):
    node = raw
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            if default is _MISSING:
                errors.append((path, "required field missing"))
            return default
        node = node[key]
    return node


def _number(value, path, errors, *, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append((path, f"expected a number, got {value!r}"))
        return None
    if integer and (not float(value).is_integer()):
        errors.append((path, f"expected an integer, got {value!r}"))
        return None
    if not math.isfinite(value):
        errors.append((path, f"must be finite, got {value!r}"))
        return None
    if positive and not value > 0:
        errors.append((path, f"must be > 0, got {value!r}"))
        return None
    return int(value) if integer else float(value)


def _per_sensor(value, k, path, errors):
    if isinstance(value, (list, tuple)):
        if len(value) != k:
            errors.append((path, f"expected {k} values (one per sensor), got {len(value)}"))
            return None
        items = [_number(v, f"{path}[{i}]", errors) for i, v in enumerate(value)]
    else:
        items = [_number(value, path, errors)] * k
    return None if any(v is None for v in items) else tuple(items)


def _point(value, path, errors):
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        errors.append((path, f"expected an [x, y] pair of numbers, got {value!r}"))
        return None
    return (float(value[0]), float(value[1]))


def config_from_dict(raw: Any) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError([("<root>", "expected a mapping of sections")])
    errors: list = []

    positions = _get(raw, "topology.sensor_positions_m", errors)
    sensors = None
    if positions is not None:
        if not isinstance(positions, list) or not positions:
            errors.append(("topology.sensor_positions_m", "expected a non-empty list of [x, y]"))
        else:
            pts = [_point(p, f"topology.sensor_positions_m[{i}]", errors) for i, p in enumerate(positions)]
            if all(p is not None for p in pts):
                sensors = tuple(pts)
    sink = _point(_get(raw, "topology.sink_position_m", errors, [0.0, 0.0]),
                  "topology.sink_position_m", errors)
    xi = _number(_get(raw, "topology.path_loss_exponent", errors), "topology.path_loss_exponent", errors)
    d0 = _number(_get(raw, "topology.reference_distance_m", errors), "topology.reference_distance_m",
                 errors, positive=True)
    sigma = _number(_get(raw, "topology.rayleigh_scale", errors), "topology.rayleigh_scale",
                    errors, positive=True)

    n_sub = _number(_get(raw, "radio.num_subchannels", errors), "radio.num_subchannels", errors,
                    positive=True, integer=True)
    bw = _number(_get(raw, "radio.bandwidth_hz", errors), "radio.bandwidth_hz", errors, positive=True)
    n0 = _number(_get(raw, "radio.noise_psd_w_per_hz", errors), "radio.noise_psd_w_per_hz", errors,
                 positive=True)
    pkt = _number(_get(raw, "radio.packet_bytes", errors), "radio.packet_bytes", errors,
                  positive=True, integer=True)
    slot = _number(_get(raw, "radio.slot_duration_s", errors, 1.0), "radio.slot_duration_s", errors,
                   positive=True)

    k = len(sensors) if sensors else 0
    pmax = aoi_caps = None
    if sensors:
        pmax = _per_sensor(_get(raw, "constraints.max_power_w", errors), k,
                           "constraints.max_power_w", errors)
        aoi_caps = _per_sensor(_get(raw, "constraints.max_avg_aoi_slots", errors), k,
                               "constraints.max_avg_aoi_slots", errors)
        if pmax and any(not p > 0 for p in pmax):
            errors.append(("constraints.max_power_w", "every cap must be > 0"))
        if aoi_caps and any(not c > 0.5 for c in aoi_caps):
            errors.append(("constraints.max_avg_aoi_slots",
                           "every cap must exceed 0.5 (the average AoI is never below 1/2)"))
    V = _number(_get(raw, "controller.V", errors), "controller.V", errors)
    if V is not None and V < 0:
        errors.append(("controller.V", f"must be >= 0, got {V!r}"))
    horizon = _number(_get(raw, "simulation.horizon_slots", errors), "simulation.horizon_slots",
                      errors, positive=True, integer=True)
    seed = _number(_get(raw, "simulation.seed", errors), "simulation.seed", errors, integer=True)
    if seed is not None and not 0 <= seed < 2 ** 64:
        errors.append(("simulation.seed", "must be an unsigned 64-bit integer"))
    trace = _get(raw, "output.trace", errors, None)
    summary = _get(raw, "output.summary", errors, None)
    for name, val in (("output.trace", trace), ("output.summary", summary)):
        if val is not None and not isinstance(val, str):
            errors.append((name, f"expected a path string or null, got {val!r}"))

    if sensors and n_sub and (k + 1) ** n_sub > MAX_MAPS:
        errors.append(("radio.num_subchannels",
                       f"(K+1)^N = {(k + 1) ** n_sub} exceeds the exhaustive-search limit {MAX_MAPS}"))

    topology = constants = None
    if not errors:
        try:
            topology = Topology(sensors, sink, xi, d0, sigma)
        except ValueError as exc:
            errors.append(("topology", str(exc)))
        constants = RadioConstants(bw, n0, pkt * 8, slot)
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(topology, constants, n_sub, pmax, aoi_caps, V, horizon, seed, trace, summary)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    topo, rc = cfg.topology, cfg.constants
    return {
        "topology": {
            "sensor_positions_m": [list(p) for p in topo.sensor_positions],
            "sink_position_m": list(topo.sink_position),
            "path_loss_exponent": topo.path_loss_exponent,
            "reference_distance_m": topo.reference_distance_m,
            "rayleigh_scale": topo.rayleigh_scale,
        },
        "radio": {
            "num_subchannels": cfg.num_subchannels,
            "bandwidth_hz": rc.bandwidth_per_subchannel_hz,
            "noise_psd_w_per_hz": rc.noise_psd_w_per_hz,
            "packet_bytes": rc.packet_size_bits // 8,
            "slot_duration_s": rc.slot_duration_s,
        },
        "constraints": {
            "max_power_w": list(cfg.max_power_w),
            "max_avg_aoi_slots": list(cfg.max_avg_aoi),
        },
        "controller": {"V": cfg.V},
        "simulation": {"horizon_slots": cfg.horizon_slots, "seed": cfg.seed},
        "output": {"trace": cfg.trace_output, "summary": cfg.summary_output},
    }


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError([(where, f"malformed YAML: {getattr(exc, 'problem', exc)}")]) from exc
    return config_from_dict(raw)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([(str(path), f"cannot read config: {exc.strerror}")]) from exc
    return parse_config(text, str(path))


def dump_config(cfg: ScenarioConfig, path=None) -> str:
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
    if path is not None:
        Path(path).write_text(text)
    return text


def default_config_text() -> str:
    return resources.files("aoi_dpp").joinpath("data/default.yaml").read_text()


def default_config() -> ScenarioConfig:
    """Two sensors, two subchannels, 180 kHz, Delta_max = 4, 600-byte packets."""
    return parse_config(default_config_text(), "default.yaml")
