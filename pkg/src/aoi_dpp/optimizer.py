"""Per-slot drift-plus-penalty subproblem, solved by exhaustive search.

Every map of subchannels to {idle, sensor 0..K-1} is enumerated. Given a
map, sensors decouple: sensor k pays c_k = V * P_k + w_k if it samples,
where P_k is its capped minimum power on the assigned subchannels and
w_k its AoI/backlog weight, so it samples iff c_k < 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .aoi import AoiVector
from .channel import ChannelRealization, RadioConstants
from .power import subset_power_table
from .queues import QueueVector

IDLE = -1
TIE_TOL = 1e-12
MAX_MAPS = 10 ** 6


@dataclass(frozen=True)
class NetworkState:
    ages: AoiVector
    queues: QueueVector

    def __post_init__(self):
        if len(self.ages.ages) != len(self.queues.backlogs):
            raise ValueError("ages and queues disagree on the number of sensors")

    @property
    def slot_index(self) -> int:
        return self.ages.slot_index

    @property
    def num_sensors(self) -> int:
        return len(self.ages.ages)

    @classmethod
    def initial(cls, aoi_caps: Sequence[float]) -> "NetworkState":
        return cls(AoiVector.initial(len(aoi_caps)), QueueVector.empty(aoi_caps))


@dataclass(frozen=True)
class SlotDecision:
    sampled: tuple[bool, ...]
    assignment: tuple[int, ...]  # per subchannel: sensor index or IDLE
    powers: np.ndarray  # (K, N)
    sensor_power_w: tuple[float, ...]
    objective_value: float

    @property
    def total_power_w(self) -> float:
        total = 0.0
        for p in self.sensor_power_w:
            total += p
        return total

    def subchannel_mask(self, sensor: int) -> int:
        return sum(1 << n for n, k in enumerate(self.assignment) if k == sensor)


def sensor_weight(age: int, backlog: float) -> float:
    """Coefficient of b_k in the per-slot bound (includes the factor 1/2)."""
    return 0.5 * (1 - (age + 1) ** 2 - 2 * backlog * age)


def check_search_size(num_sensors: int, num_subchannels: int) -> None:
    size = (num_sensors + 1) ** num_subchannels
    if size > MAX_MAPS:
        raise ValueError(
            f"exhaustive search over (K+1)^N = {size} subchannel maps exceeds {MAX_MAPS}; "
            "reduce the number of subchannels or sensors")


@lru_cache(maxsize=None)
def assignment_maps(num_sensors: int, num_subchannels: int):
    """All maps in lexicographic order, as (assignment, per-sensor subset bitmask)."""
    check_search_size(num_sensors, num_subchannels)
    maps = []
    for assign in itertools.product(range(IDLE, num_sensors), repeat=num_subchannels):
        masks = [0] * num_sensors
        for n, k in enumerate(assign):
            if k != IDLE:
                masks[k] |= 1 << n
        maps.append((assign, tuple(masks)))
    return tuple(maps)


def pick_map(objectives: Sequence[float]) -> int:
    """First (lexicographically smallest) map within TIE_TOL of the best objective."""
    best = min(objectives)
    for i, obj in enumerate(objectives):
        if obj <= best + TIE_TOL:
            return i
    raise AssertionError("unreachable")


def solve_slot(state: NetworkState, channels: ChannelRealization, V: float,
               caps: Sequence[float], constants: RadioConstants) -> SlotDecision:
    gains = np.asarray(channels.gains, dtype=float)
    K, N = gains.shape
    if K != state.num_sensors:
        raise ValueError(f"channel matrix has {K} sensors, state has {state.num_sensors}")
    if len(caps) != K:
        raise ValueError(f"expected {K} power caps, got {len(caps)}")
    maps = assignment_maps(K, N)

    table, alloc = subset_power_table(gains, constants, caps, with_powers=True)
    table = table.tolist()
    weights = [sensor_weight(a, q) for a, q in zip(state.ages.ages, state.queues.backlogs)]

    objectives = []
    for _, masks in maps:
        total = 0.0
        for k in range(K):
            p = table[k][masks[k]]
            if masks[k] and p != math.inf:
                c = V * p + weights[k]
                if c < 0:
                    total += c
        objectives.append(total)
    best = pick_map(objectives)
    assign, masks = maps[best]

    sampled, sensor_power = [], []
    powers = np.zeros((K, N))
    for k in range(K):
        p = table[k][masks[k]]
        take = bool(masks[k]) and p != math.inf and V * p + weights[k] < 0
        sampled.append(take)
        sensor_power.append(p if take else 0.0)
        if take:
            powers[k] = alloc[k, masks[k]]
    return SlotDecision(tuple(sampled), assign, powers, tuple(sensor_power), objectives[best])
