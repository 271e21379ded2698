"""Per-sensor Age of Information in slots, and its time average."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class AoiVector:
    ages: tuple[int, ...]
    slot_index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ages", tuple(int(a) for a in self.ages))
        if any(a < 0 for a in self.ages):
            raise ValueError(f"ages must be >= 0, got {self.ages}")

    @classmethod
    def initial(cls, num_sensors: int) -> "AoiVector":
        return cls((0,) * num_sensors, slot_index=1)

    def __len__(self):
        return len(self.ages)


def next_age(age: int, sampled: bool) -> int:
    return 1 if sampled else age + 1


def next_age_algebraic(age: int, sampled: bool) -> int:
    b = int(sampled)
    return b + (1 - b) * (age + 1)


def step_aoi(ages: AoiVector, sampled: Sequence[bool]) -> AoiVector:
    """Age at the start of slot t+1 given the slot-t sampling actions."""
    if len(sampled) != len(ages.ages):
        raise ValueError(f"expected {len(ages.ages)} sampling bits, got {len(sampled)}")
    return AoiVector(tuple(next_age(a, bool(b)) for a, b in zip(ages.ages, sampled)),
                     slot_index=ages.slot_index + 1)


@dataclass(frozen=True)
class AoiAverage:
    """Running time-average AoI: 1/2 + mean of the per-slot ages.

    The 1/2 is the triangle under the sawtooth within each slot.
    """
    running_sum: int = 0
    slots_counted: int = 0

    @property
    def value(self) -> float:
        if self.slots_counted == 0:
            raise ValueError("no slots accumulated yet")
        return 0.5 + self.running_sum / self.slots_counted


def accumulate_average(avg: AoiAverage, age_at_slot: int) -> AoiAverage:
    return AoiAverage(avg.running_sum + int(age_at_slot), avg.slots_counted + 1)


def average_aoi(age_trace: Sequence[int]) -> float:
    """Time-average AoI of a full per-slot age trace."""
    if not len(age_trace):
        raise ValueError("empty age trace")
    return 0.5 + sum(int(a) for a in age_trace) / len(age_trace)
