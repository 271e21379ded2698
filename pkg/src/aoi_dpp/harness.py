"""V sweeps over seeds, summary statistics and CSV output."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import ConfigError, ScenarioConfig
from .controller import EpisodeMetrics, SlotRecord, simulate_batch
from .optimizer import sensor_weight

TRACE_FIELDS = ["slot", "sensor", "delta_before", "Q_before", "b", "assigned_subchannels",
                "power_w", "objective_contribution"]


def derive_seed(base_seed: int, episode_index: int) -> int:
    """Per-episode channel seed: base seed XOR episode index."""
    return int(base_seed) ^ int(episode_index)


def episode_seeds(base_seed: int, count: int) -> list[int]:
    return [derive_seed(base_seed, i) for i in range(count)]


def summary_columns(num_sensors: int) -> list[str]:
    cols = ["V", "seeds"]
    for k in range(1, num_sensors + 1):
        cols += [f"aoi_mean_{k}", f"aoi_std_{k}"]
    cols += ["power_mean_w", "power_std_w"]
    cols += [f"slack_{k}" for k in range(1, num_sensors + 1)]
    cols += [f"backlog_mean_{k}" for k in range(1, num_sensors + 1)]
    cols += [f"sampling_freq_{k}" for k in range(1, num_sensors + 1)]
    return cols


def _std(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1)) if x.size > 1 else 0.0


def aggregate_rows(v_values, seeds, avg_aoi, avg_power, mean_backlog, sampling_freq,
                   caps: Sequence[float]) -> list[dict]:
    """One row per V; statistics taken over the seed axis (axis 1)."""
    rows = []
    for i, v in enumerate(v_values):
        row = {"V": float(v), "seeds": len(seeds)}
        K = avg_aoi.shape[-1]
        for k in range(K):
            row[f"aoi_mean_{k + 1}"] = float(np.mean(avg_aoi[i, :, k]))
            row[f"aoi_std_{k + 1}"] = _std(avg_aoi[i, :, k])
        row["power_mean_w"] = float(np.mean(avg_power[i]))
        row["power_std_w"] = _std(avg_power[i])
        for k in range(K):
            row[f"slack_{k + 1}"] = float(caps[k]) - row[f"aoi_mean_{k + 1}"]
        for k in range(K):
            row[f"backlog_mean_{k + 1}"] = float(np.mean(mean_backlog[i, :, k]))
        for k in range(K):
            row[f"sampling_freq_{k + 1}"] = float(np.mean(sampling_freq[i, :, k]))
        rows.append(row)
    return rows


def run_sweep(base: ScenarioConfig, v_values: Sequence[float], seeds: Sequence[int]) -> list[dict]:
    """Average episode metrics over ``seeds`` for each V; rows sorted by V.

    Output does not depend on the order of ``v_values`` or ``seeds``.
    """
    if not len(v_values) or not len(seeds):
        raise ValueError("need at least one V value and one seed")
    bad = [v for v in v_values if not v >= 0]
    if bad:
        raise ConfigError([("V", f"V must be >= 0, got {bad}")])
    v_sorted = sorted({float(v) for v in v_values})
    s_sorted = sorted({int(s) for s in seeds})
    res = simulate_batch(base, v_sorted, s_sorted)
    return aggregate_rows(v_sorted, s_sorted, res["avg_aoi"], res["avg_power_w"],
                          res["mean_backlog"], res["sampling_frequency"], base.max_avg_aoi)


def episode_row(metrics: EpisodeMetrics, caps: Sequence[float]) -> dict:
    K = len(metrics.avg_aoi)
    return aggregate_rows(
        [metrics.V], [metrics.seed],
        np.array(metrics.avg_aoi).reshape(1, 1, K),
        np.array([[metrics.avg_power_w]]),
        np.array(metrics.mean_backlog).reshape(1, 1, K),
        np.array(metrics.sampling_frequency).reshape(1, 1, K),
        caps,
    )[0]


def write_summary(table: Sequence[dict], path) -> None:
    if not table:
        raise ValueError("empty summary table")
    fields = list(table[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in table:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def read_summary(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (int(v) if k == "seeds" else float(v)) for k, v in row.items()} for row in rows]


def trace_rows(records: Iterable[SlotRecord]):
    for rec in records:
        dec, before = rec.decision, rec.state_before
        for k, (age, q) in enumerate(zip(before.ages.ages, before.queues.backlogs)):
            p = dec.sensor_power_w[k]
            contrib = rec.V * p + sensor_weight(age, q) if dec.sampled[k] else 0.0
            yield [rec.slot, k + 1, age, repr(q), int(dec.sampled[k]), dec.subchannel_mask(k),
                   repr(p), repr(contrib)]


def write_trace(records: Iterable[SlotRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_FIELDS)
        writer.writerows(trace_rows(records))


def read_trace(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(TRACE_FIELDS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: trace is missing columns {sorted(missing)}")
        out = []
        for line, row in enumerate(reader, start=2):
            try:
                out.append({
                    "slot": int(row["slot"]), "sensor": int(row["sensor"]),
                    "delta_before": int(row["delta_before"]), "Q_before": float(row["Q_before"]),
                    "b": int(row["b"]), "assigned_subchannels": int(row["assigned_subchannels"]),
                    "power_w": float(row["power_w"]),
                    "objective_contribution": float(row["objective_contribution"]),
                })
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line}: bad trace row ({exc})") from exc
        return out


def summary_from_trace(rows: Sequence[dict], V: float, seed: int, caps: Sequence[float]) -> dict:
    """Recompute a single-episode summary row from trace rows alone."""
    K = max(r["sensor"] for r in rows)
    T = max(r["slot"] for r in rows)
    ages = np.zeros(K)
    backlog = np.zeros(K)
    samples = np.zeros(K)
    power = 0.0
    for r in rows:
        k = r["sensor"] - 1
        ages[k] += r["delta_before"]
        backlog[k] += r["Q_before"]
        samples[k] += r["b"]
        power += r["power_w"]
    metrics = EpisodeMetrics(
        avg_aoi=list(0.5 + ages / T), avg_power_w=power / T, mean_backlog=list(backlog / T),
        sampling_frequency=list(samples / T), horizon_slots=T, V=V, seed=seed)
    return episode_row(metrics, caps)
