"""Drift-plus-penalty controller: per-slot solve, state recursion, bound audit.

Within a slot: channels are drawn, the slot problem is solved, the sample
(if any) is delivered within the slot, then ages and virtual queues are
advanced to their slot t+1 values.

:func:`run_episode` walks one episode through :func:`solve_slot` and can keep
full per-slot records. :func:`simulate_batch` runs the same recursion for many
(V, seed) pairs at once with numpy; it reproduces :func:`run_episode` metrics
exactly and is what sweeps use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .aoi import AoiAverage, accumulate_average, step_aoi
from .channel import ChannelRealization, channel_stream, draw_channel_block
from .config import ScenarioConfig
from .optimizer import (TIE_TOL, NetworkState, SlotDecision, assignment_maps,
                        solve_slot)
from .power import subset_power_table
from .queues import StabilityDiagnostic, lyapunov_value, update_queue

BOUND_TOL = 1e-6
CHUNK_SLOTS = 4096

__all__ = ["NetworkState", "SlotRecord", "EpisodeMetrics", "run_episode", "audit_bound",
           "drift_bound", "drift_bound_from_actions", "simulate_batch"]


@dataclass(frozen=True)
class SlotRecord:
    slot: int
    V: float
    decision: SlotDecision
    state_before: NetworkState
    state_after: NetworkState
    total_power_w: float
    lyapunov_before: float
    lyapunov_after: float
    bound_value: float
    dpp_value: float


@dataclass
class EpisodeMetrics:
    avg_aoi: list[float]
    avg_power_w: float
    mean_backlog: list[float]
    sampling_frequency: list[float]
    horizon_slots: int
    V: float
    seed: int
    records: Optional[list[SlotRecord]] = field(default=None, repr=False)


def drift_bound(state: NetworkState, next_ages: Sequence[int], total_power_w: float,
                V: float, caps: Sequence[float]) -> float:
    """Upper bound on L(Q(t+1)) - L(Q(t)) + V * power at the realised next ages.

    Per sensor, (max[Q - A, 0] + d)^2 <= Q^2 + A^2 + d^2 + 2Q(d - A) with
    A = cap - 1/2 and d the next age.
    """
    total = 0.0
    for q, d, cap in zip(state.queues.backlogs, next_ages, caps):
        slack = cap - 0.5
        total += slack * slack + d * d + 2 * q * (d - slack)
    return V * total_power_w + 0.5 * total


def drift_bound_from_actions(state: NetworkState, sampled: Sequence[bool], total_power_w: float,
                             V: float, caps: Sequence[float]) -> float:
    """Same bound written through the sampling bits; the b-free part is what the optimiser drops."""
    total = 0.0
    for q, age, b, cap in zip(state.queues.backlogs, state.ages.ages, sampled, caps):
        slack = cap - 0.5
        constant = slack * slack + (age + 1) ** 2 + 2 * q * (age + 1) - 2 * q * slack
        total += constant + int(b) * (1 - (age + 1) ** 2 - 2 * q * age)
    return V * total_power_w + 0.5 * total


def audit_bound(record: SlotRecord, caps: Sequence[float]) -> bool:
    """Check the realised drift-plus-penalty against the bound, recomputed from the record."""
    bound = drift_bound(record.state_before, record.state_after.ages.ages, record.total_power_w,
                        record.V, caps)
    dpp = (lyapunov_value(record.state_after.queues) - lyapunov_value(record.state_before.queues)
           + record.V * record.total_power_w)
    return dpp <= bound + BOUND_TOL


def run_episode(config: ScenarioConfig, record: bool = False, seed: Optional[int] = None) -> EpisodeMetrics:
    seed = config.seed if seed is None else seed
    K, N, T = config.num_sensors, config.num_subchannels, config.horizon_slots
    V, caps, pmax = config.V, config.max_avg_aoi, config.max_power_w
    assignment_maps(K, N)  # fail fast on oversized searches

    rng = channel_stream(seed)
    state = NetworkState.initial(caps)
    averages = [AoiAverage() for _ in range(K)]
    backlog = StabilityDiagnostic(K)
    samples = [0] * K
    power_sum = 0.0
    records: list[SlotRecord] = [] if record else None

    block = None
    for t in range(1, T + 1):
        offset = (t - 1) % CHUNK_SLOTS
        if offset == 0:
            block = draw_channel_block(config.topology, N, min(CHUNK_SLOTS, T - t + 1), rng)
        channels = ChannelRealization(block[offset], t)
        decision = solve_slot(state, channels, V, pmax, config.constants)

        next_ages = step_aoi(state.ages, decision.sampled)
        after = NetworkState(next_ages, update_queue(state.queues, next_ages))
        slot_power = decision.total_power_w

        for k in range(K):
            averages[k] = accumulate_average(averages[k], state.ages.ages[k])
            samples[k] += decision.sampled[k]
        backlog.observe(state.queues.backlogs)
        power_sum += slot_power

        if record:
            l_before = lyapunov_value(state.queues)
            l_after = lyapunov_value(after.queues)
            records.append(SlotRecord(
                slot=t, V=V, decision=decision, state_before=state, state_after=after,
                total_power_w=slot_power, lyapunov_before=l_before, lyapunov_after=l_after,
                bound_value=drift_bound(state, next_ages.ages, slot_power, V, caps),
                dpp_value=(l_after - l_before) + V * slot_power,
            ))
        state = after

    return EpisodeMetrics(
        avg_aoi=[a.value for a in averages],
        avg_power_w=power_sum / T,
        mean_backlog=backlog.means,
        sampling_frequency=[s / T for s in samples],
        horizon_slots=T, V=V, seed=seed, records=records,
    )


def simulate_batch(config: ScenarioConfig, v_values: Sequence[float], seeds: Sequence[int]) -> dict:
    """Run every (V, seed) episode of ``config`` in lock-step.

    Returns arrays indexed [v, seed, sensor] (``avg_aoi``, ``mean_backlog``,
    ``sampling_frequency``) and [v, seed] (``avg_power_w``). Channel streams
    are per seed and shared across V values.
    """
    K, N, T = config.num_sensors, config.num_subchannels, config.horizon_slots
    maps = assignment_maps(K, N)
    masks = np.array([m for _, m in maps])  # (M, K)
    sensors = np.broadcast_to(np.arange(K), masks.shape)
    nv, ns = len(v_values), len(seeds)

    V = np.asarray(v_values, dtype=float).reshape(nv, 1, 1, 1)
    slack = np.asarray(config.max_avg_aoi, dtype=float) - 0.5
    rngs = [channel_stream(s) for s in seeds]

    ages = np.zeros((nv, ns, K), dtype=np.int64)
    Q = np.zeros((nv, ns, K))
    age_sum = np.zeros((nv, ns, K), dtype=np.int64)
    q_sum = np.zeros((nv, ns, K))
    power_sum = np.zeros((nv, ns))
    sample_count = np.zeros((nv, ns, K), dtype=np.int64)

    done = 0
    while done < T:
        n_slots = min(CHUNK_SLOTS, T - done)
        gains = np.stack([draw_channel_block(config.topology, N, n_slots, r) for r in rngs], axis=1)
        table = subset_power_table(gains, config.constants, config.max_power_w)  # (C, S, K, 2^N)
        for i in range(n_slots):
            Pm = table[i][:, sensors, masks]  # (S, M, K)
            usable = np.isfinite(Pm)
            Pm = np.where(usable, Pm, 0.0)
            w = 0.5 * (1 - (ages + 1) ** 2 - 2 * Q * ages)
            cost = V * Pm + w[:, :, None, :]
            take = usable & (cost < 0)
            contrib = np.where(take, cost, 0.0)
            obj = contrib[..., 0].copy()
            for k in range(1, K):
                obj += contrib[..., k]
            best = obj.min(axis=-1, keepdims=True)
            pick = np.argmax(obj <= best + TIE_TOL, axis=-1)[..., None, None]
            sampled = np.take_along_axis(take, pick, axis=2)[:, :, 0, :]
            power = np.where(sampled, np.take_along_axis(np.broadcast_to(Pm, take.shape), pick, axis=2)[:, :, 0, :], 0.0)

            age_sum += ages
            q_sum += Q
            slot_power = power[..., 0].copy()
            for k in range(1, K):
                slot_power += power[..., k]
            power_sum += slot_power
            sample_count += sampled

            ages = np.where(sampled, 1, ages + 1)
            Q = np.maximum(Q - slack, 0.0) + ages
        done += n_slots

    return {
        "v_values": list(map(float, v_values)),
        "seeds": list(map(int, seeds)),
        "avg_aoi": 0.5 + age_sum / T,
        "avg_power_w": power_sum / T,
        "mean_backlog": q_sum / T,
        "sampling_frequency": sample_count / T,
    }
