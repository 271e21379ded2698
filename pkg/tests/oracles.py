"""Independent reference computations used by the tests."""

import itertools

import numpy as np

from aoi_dpp.power import min_power_capped


def power_for_rates(a, rates_bits, W, T):
    """Power needed to carry ``rates_bits`` on channels with noise-to-gain ratios ``a``."""
    return sum(ai * (2.0 ** (r / (T * W)) - 1.0) for ai, r in zip(a, rates_bits))


def grid_min_power(gains, eta, W=1.0, N0=1.0, T=1.0, points=41, rounds=12):
    """Minimum total power by refined grid search over how eta is split across channels.

    The objective is convex in the rate split, so zooming the grid around the
    best point converges to the optimum from above.
    """
    a = [W * N0 / g for g in gains]
    m = len(a)
    if m == 1:
        return power_for_rates(a, [eta], W, T)
    lo = np.zeros(m - 1)
    hi = np.full(m - 1, float(eta))
    best, center = np.inf, None
    for _ in range(rounds):
        axes = [np.linspace(l, h, points) for l, h in zip(lo, hi)]
        for split in itertools.product(*axes):
            rest = eta - sum(split)
            if rest < -1e-15 * eta:
                continue
            value = power_for_rates(a, list(split) + [max(rest, 0.0)], W, T)
            if value < best:
                best, center = value, np.array(split)
        step = (hi - lo) / (points - 1)
        lo = np.maximum(center - 2 * step, 0.0)
        hi = np.minimum(center + 2 * step, eta)
    return best


def weight(age, backlog):
    return 0.5 * (1 - (age + 1) ** 2 - 2 * backlog * age)


def brute_force_slot(ages, backlogs, gains, V, p_max, constants, tol=1e-12):
    """Joint enumeration over subchannel maps x sampling vectors.

    Returns (objective, assignment, sampled) for the lexicographically
    smallest (map, b) pair within ``tol`` of the best objective.
    """
    gains = np.asarray(gains, dtype=float)
    K, N = gains.shape
    weights = [weight(a, q) for a, q in zip(ages, backlogs)]
    candidates = []
    for assign in itertools.product(range(-1, K), repeat=N):
        power = []
        for k in range(K):
            usable = [gains[k, n] for n in range(N) if assign[n] == k and gains[k, n] > 0]
            res = min_power_capped(usable, constants, p_max[k]) if usable else None
            power.append(None if res is None else res.total_power_w)
        for b in itertools.product((0, 1), repeat=K):
            if any(b[k] and power[k] is None for k in range(K)):
                continue
            obj = 0.0
            for k in range(K):
                if b[k]:
                    obj += V * power[k] + weights[k]
            candidates.append((obj, assign, b))
    best = min(c[0] for c in candidates)
    for obj, assign, b in candidates:
        if obj <= best + tol:
            return obj, assign, tuple(bool(x) for x in b)
