"""Channel power gains, SNR and per-slot achievable rate.

Gains are stored as |h|^2, i.e. the squared product of the large-scale
path-loss factor (d/d0)^xi and a Rayleigh amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class RadioConstants:
    bandwidth_per_subchannel_hz: float
    noise_psd_w_per_hz: float
    packet_size_bits: int
    slot_duration_s: float = 1.0

    def __post_init__(self):
        for name in ("bandwidth_per_subchannel_hz", "noise_psd_w_per_hz",
                     "packet_size_bits", "slot_duration_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def from_bytes(cls, bandwidth_hz, noise_psd_w_per_hz, packet_bytes, slot_duration_s=1.0):
        return cls(bandwidth_hz, noise_psd_w_per_hz, int(packet_bytes) * 8, slot_duration_s)

    @property
    def noise_power_w(self) -> float:
        """Noise power over one subchannel, W * N0."""
        return self.bandwidth_per_subchannel_hz * self.noise_psd_w_per_hz

    @property
    def bits_per_hz(self) -> float:
        """Spectral efficiency summed over subchannels needed to carry one packet in one slot."""
        return self.packet_size_bits / (self.slot_duration_s * self.bandwidth_per_subchannel_hz)


@dataclass(frozen=True)
class Topology:
    sensor_positions: tuple[tuple[float, float], ...]
    sink_position: tuple[float, float] = (0.0, 0.0)
    path_loss_exponent: float = -3.0
    reference_distance_m: float = 1.0
    rayleigh_scale: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "sensor_positions",
                           tuple((float(x), float(y)) for x, y in self.sensor_positions))
        object.__setattr__(self, "sink_position", tuple(float(v) for v in self.sink_position))
        if not self.sensor_positions:
            raise ValueError("at least one sensor is required")
        if not self.reference_distance_m > 0:
            raise ValueError("reference_distance_m must be > 0")
        if not self.rayleigh_scale > 0:
            raise ValueError("rayleigh_scale must be > 0")
        for k, d in enumerate(self.distances()):
            if not d > 0:
                raise ValueError(f"sensor {k} coincides with the sink")

    @property
    def num_sensors(self) -> int:
        return len(self.sensor_positions)

    def distances(self) -> np.ndarray:
        pos = np.asarray(self.sensor_positions, dtype=float)
        return np.hypot(pos[:, 0] - self.sink_position[0], pos[:, 1] - self.sink_position[1])

    def large_scale_amplitude(self) -> np.ndarray:
        """Per-sensor (d/d0)^xi, with xi applied as signed."""
        return (self.distances() / self.reference_distance_m) ** self.path_loss_exponent


@dataclass(frozen=True)
class ChannelRealization:
    gains: np.ndarray  # (K, N) power gains
    slot_index: int

    @property
    def num_sensors(self) -> int:
        return self.gains.shape[0]

    @property
    def num_subchannels(self) -> int:
        return self.gains.shape[1]


def channel_stream(seed: int) -> np.random.Generator:
    """Dedicated, reproducible random stream for channel draws."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def rayleigh_amplitudes(rng: np.random.Generator, scale: float, shape) -> np.ndarray:
    """Inverse-CDF Rayleigh draws, c = scale * sqrt(-2 ln u) with u in (0, 1]."""
    u = 1.0 - rng.random(shape)
    return scale * np.sqrt(-2.0 * np.log(u))


def draw_channel_block(topology: Topology, num_subchannels: int, num_slots: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Gains for ``num_slots`` consecutive slots, shape (num_slots, K, N).

    Consumes the stream exactly as ``num_slots`` successive calls to
    :func:`draw_channels` would.
    """
    c = rayleigh_amplitudes(rng, topology.rayleigh_scale,
                            (num_slots, topology.num_sensors, num_subchannels))
    amp = topology.large_scale_amplitude()[None, :, None] * c
    return amp * amp


def draw_channels(topology: Topology, num_subchannels: int, slot: int,
                  rng: np.random.Generator) -> ChannelRealization:
    gains = draw_channel_block(topology, num_subchannels, 1, rng)[0]
    return ChannelRealization(gains=gains, slot_index=slot)


def snr(power_w: float, gain: float, constants: RadioConstants) -> float:
    return power_w * gain / constants.noise_power_w


def rate_bits_per_slot(power_w: float, gain: float, constants: RadioConstants) -> float:
    return (constants.slot_duration_s * constants.bandwidth_per_subchannel_hz
            * math.log2(1.0 + snr(power_w, gain, constants)))


def sum_rate_bits(powers: Sequence[float], gains: Sequence[float], constants: RadioConstants) -> float:
    return sum(rate_bits_per_slot(p, g, constants) for p, g in zip(powers, gains))
