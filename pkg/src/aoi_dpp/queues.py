"""Virtual queues that turn the average-AoI caps into a stability problem."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .aoi import AoiAverage, AoiVector


@dataclass(frozen=True)
class QueueVector:
    backlogs: tuple[float, ...]
    aoi_caps: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "backlogs", tuple(float(q) for q in self.backlogs))
        object.__setattr__(self, "aoi_caps", tuple(float(c) for c in self.aoi_caps))
        if len(self.backlogs) != len(self.aoi_caps):
            raise ValueError("backlogs and aoi_caps differ in length")
        if any(q < 0 for q in self.backlogs):
            raise ValueError(f"backlogs must be >= 0, got {self.backlogs}")
        if any(not c > 0.5 for c in self.aoi_caps):
            # the time-average AoI is never below 1/2
            raise ValueError(f"AoI caps must exceed 1/2, got {self.aoi_caps}")

    @classmethod
    def empty(cls, aoi_caps: Sequence[float]) -> "QueueVector":
        return cls((0.0,) * len(aoi_caps), tuple(aoi_caps))


def queue_step(backlog: float, cap: float, next_age: int) -> float:
    return max(backlog - (cap - 0.5), 0.0) + next_age


def update_queue(q: QueueVector, next_ages: AoiVector) -> QueueVector:
    if len(next_ages.ages) != len(q.backlogs):
        raise ValueError(f"expected {len(q.backlogs)} ages, got {len(next_ages.ages)}")
    return QueueVector(
        tuple(queue_step(b, c, a) for b, c, a in zip(q.backlogs, q.aoi_caps, next_ages.ages)),
        q.aoi_caps,
    )


def lyapunov_value(q: QueueVector | Sequence[float]) -> float:
    backlogs = q.backlogs if isinstance(q, QueueVector) else q
    return 0.5 * sum(b * b for b in backlogs)


def constraint_slack(avg_ages: Sequence[AoiAverage], caps: Sequence[float]) -> list[float]:
    """Cap minus realised average AoI per sensor; negative means violated."""
    return [c - a.value for a, c in zip(avg_ages, caps)]


@dataclass
class StabilityDiagnostic:
    """Running per-sensor mean of the backlog (finite-horizon stand-in for strong stability)."""
    num_sensors: int
    window: int = 0
    sums: list[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.sums:
            self.sums = [0.0] * self.num_sensors

    def observe(self, backlogs: Sequence[float]) -> None:
        for k, b in enumerate(backlogs):
            self.sums[k] += b
        self.window += 1

    @property
    def means(self) -> list[float]:
        if self.window == 0:
            return [0.0] * self.num_sensors
        return [s / self.window for s in self.sums]
