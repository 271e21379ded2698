"""Minimum transmit power that carries exactly one packet per slot.

For a sensor holding subchannels with gains g_n, the problem

    minimize  sum_n p_n
    s.t.      sum_n T W log2(1 + p_n g_n / (W N0)) = eta,   p_n >= 0

is solved by inverse water-filling: p_n = max(0, mu - a_n) with a_n = W N0 / g_n.
On the active set A (the |A| strongest channels) the rate equality gives

    log2(mu) = (eta / (T W) + sum_{n in A} log2(a_n)) / |A|

and the active set is the longest prefix (by increasing a_n) with mu > a_n.
All routines here share :func:`water_fill`, so totals computed in bulk for the
simulator are bit-identical to the scalar API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import RadioConstants, sum_rate_bits


@dataclass(frozen=True)
class AllocationResult:
    per_subchannel_power_w: tuple[float, ...]  # aligned with the input gains
    total_power_w: float
    achieved_rate_bits: float
    water_level: float


def water_fill(gains, constants: RadioConstants):
    """Vectorised inverse water-filling over the last axis.

    Entries with gain <= 0 are treated as not assigned. Returns
    ``(powers, totals, levels)``; rows with no usable gain get
    ``total = inf`` and zero powers.
    """
    g = np.asarray(gains, dtype=float)
    n = g.shape[-1]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(g > 0, constants.noise_power_w / np.where(g > 0, g, 1.0), np.inf)
        order = np.argsort(a, axis=-1, kind="stable")
        a_sorted = np.take_along_axis(a, order, axis=-1)
        counts = np.arange(1, n + 1, dtype=float)
        log_mu = (constants.bits_per_hz + np.cumsum(np.log2(a_sorted), axis=-1)) / counts
        mu = np.exp2(log_mu)
        valid = np.isfinite(a_sorted) & (mu > a_sorted)
        active = valid.sum(axis=-1)
        idx = np.maximum(active - 1, 0)[..., None]
        level = np.take_along_axis(mu, idx, axis=-1)
        p_sorted = np.where(np.arange(n) < active[..., None], level - a_sorted, 0.0)

    total = p_sorted[..., 0].copy()
    for j in range(1, n):
        total += p_sorted[..., j]
    feasible = (active > 0) & np.isfinite(total)
    total = np.where(feasible, total, np.inf)
    powers = np.zeros_like(p_sorted)
    np.put_along_axis(powers, order, np.where(feasible[..., None], p_sorted, 0.0), axis=-1)
    level = np.where(feasible, level[..., 0], np.nan)
    return powers, total, level


def subset_masks(num_subchannels: int) -> np.ndarray:
    """(2^N, N) boolean matrix; row m selects subchannel n iff bit n of m is set."""
    m = np.arange(1 << num_subchannels)
    return ((m[:, None] >> np.arange(num_subchannels)) & 1).astype(bool)


def subset_power_table(gains, constants: RadioConstants, p_max, with_powers: bool = False):
    """Capped minimum total power for every (sensor, subchannel subset).

    ``gains`` has shape (..., K, N). The result has shape (..., K, 2^N),
    indexed by subset bitmask, with ``inf`` where the subset is empty,
    holds only zero-gain subchannels, or needs more than the sensor's cap.
    With ``with_powers`` the per-subchannel powers (..., K, 2^N, N) are
    returned as well.
    """
    g = np.asarray(gains, dtype=float)
    masks = subset_masks(g.shape[-1])
    masked = np.where(masks, g[..., None, :], 0.0)
    powers, total, _ = water_fill(masked, constants)
    cap = np.asarray(p_max, dtype=float)[:, None]
    total = np.where(total <= cap, total, np.inf)
    if with_powers:
        return total, powers
    return total


def _check_gains(gains: Sequence[float]) -> np.ndarray:
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("need a non-empty list of subchannel gains")
    if not np.all(np.isfinite(g) & (g > 0)):
        raise ValueError(f"subchannel gains must be finite and > 0, got {list(g)}")
    return g


def min_power_for_rate(gains_on_assigned: Sequence[float], constants: RadioConstants) -> AllocationResult:
    g = _check_gains(gains_on_assigned)
    powers, total, level = water_fill(g, constants)
    powers = tuple(float(p) for p in powers)
    return AllocationResult(
        per_subchannel_power_w=powers,
        total_power_w=float(total),
        achieved_rate_bits=sum_rate_bits(powers, g.tolist(), constants),
        water_level=float(level),
    )


def min_power_capped(gains_on_assigned: Sequence[float], constants: RadioConstants,
                     p_max: float) -> Optional[AllocationResult]:
    """Like :func:`min_power_for_rate`, or ``None`` if the total exceeds ``p_max``."""
    result = min_power_for_rate(gains_on_assigned, constants)
    if not (math.isfinite(result.total_power_w) and result.total_power_w <= p_max):
        return None
    return result
