"""Shared instance generators and small numerical oracles for the tests.

Everything here is deterministic per seed so failures reproduce exactly.
"""

from __future__ import annotations

import math
import random

import numpy as np

from ehsched import (
    BatterySchedule,
    CumulativeCurve,
    LeakageProblem,
    awgn_rate,
    dying_battery_scenario,
    from_packet_arrivals,
    min_energy_from_battery,
    p_star,
    zero_curve,
)

RATE1 = awgn_rate(1.0)


def random_corridor(seed: int) -> tuple[CumulativeCurve, CumulativeCurve]:
    """Random feasible (harvested, minimum) pair.

    Mixes the three corridor shapes the solver must handle: plain packet
    arrivals (floor at zero), packets with a finite battery (overflow floor),
    and dying batteries (staircase floor under a constant ceiling).  Arrival
    gaps are kept at or above 0.3 time units so oracle grids stay sane.
    """
    rng = random.Random(seed)
    style = rng.choice(("packets", "packets", "capped", "dying"))
    if style == "dying":
        n = rng.randint(1, 3)
        amounts = [rng.uniform(0.5, 3.0) for _ in range(n)]
        times, t = [], 0.0
        for _ in range(n):
            t += rng.uniform(0.5, 2.0)
            times.append(t)
        return dying_battery_scenario(amounts, times)

    n = rng.randint(1, 6)
    t = 0.0 if rng.random() < 0.7 else rng.uniform(0.3, 1.5)
    packets = []
    for _ in range(n):
        packets.append((t, rng.uniform(0.3, 3.0)))
        t += rng.uniform(0.3, 2.0)
    horizon = packets[-1][0] + rng.uniform(0.5, 2.0)
    harvested = from_packet_arrivals(packets, horizon)
    if style == "capped":
        # any packet larger than the battery would overflow instantaneously,
        # which no schedule can absorb, so the cap must clear every jump
        total = sum(e for _, e in packets)
        largest = max(e for _, e in packets)
        capacity = max(rng.uniform(0.4, 0.9) * total, largest + 0.1)
        minimum = min_energy_from_battery(
            harvested, BatterySchedule.constant(capacity, horizon)
        )
    else:
        minimum = zero_curve(horizon)
    return harvested, minimum


def random_packets(seed: int, max_packets: int = 5) -> tuple[tuple[float, float], ...]:
    """Random packet train starting at t=0 with gaps of at least 0.3."""
    rng = random.Random(seed)
    n = rng.randint(1, max_packets)
    t, packets = 0.0, []
    for _ in range(n):
        packets.append((t, rng.uniform(0.5, 4.0)))
        t += rng.uniform(0.3, 2.5)
    return tuple(packets)


def random_leakage_problem(
    seed: int, bounded: bool = True, epsilon: float | None = None
) -> LeakageProblem:
    """Random leakage instance; bounded deadlines land past the last arrival."""
    rng = random.Random(seed)
    packets = random_packets(seed)
    eps = rng.uniform(0.1, 1.5) if epsilon is None else epsilon
    deadline = packets[-1][0] + rng.uniform(0.5, 2.5) if bounded else None
    return LeakageProblem(packets, eps, deadline, RATE1)


def binding_leakage_problem(seed: int, margin: float = 0.05) -> LeakageProblem:
    """Random bounded instance whose single-packet relaxation is deadline-bound.

    The overall energy rate is pushed strictly above ``p_star + epsilon``, so
    the all-at-once optimum is the unique constant-power schedule spanning the
    whole horizon.  Then ``D_NT`` equals ``D_ST`` exactly when every prefix of
    arrivals keeps up with the overall rate, and every prefix average is kept
    at least ``margin`` away (relatively) from that rate so the comparison is
    numerically unambiguous either way.
    """
    rng = random.Random(seed)
    eps = rng.uniform(0.2, 1.0)
    p_opt = p_star(RATE1, eps)
    n = rng.randint(2, 5)
    durations = [rng.uniform(0.5, 2.0) for _ in range(n)]
    deadline = sum(durations)
    overall = (1.0 + rng.uniform(0.1, 0.6)) * p_opt + eps  # energy per unit time
    total = overall * deadline
    for _ in range(1000):
        weights = [rng.uniform(0.2, 1.0) for _ in range(n)]
        scale = total / sum(weights)
        energies = [w * scale for w in weights]
        prefix_e, prefix_t, clear = 0.0, 0.0, True
        for k in range(n - 1):
            prefix_e += energies[k]
            prefix_t += durations[k]
            if abs(prefix_e / prefix_t - overall) < margin * overall:
                clear = False
                break
        if clear:
            break
    else:  # pragma: no cover - generator failed to separate prefixes
        raise AssertionError(f"no margin-clear instance for seed {seed}")
    t, packets = 0.0, []
    for e, d in zip(energies, durations):
        packets.append((t, e))
        t += d
    return LeakageProblem(tuple(packets), eps, deadline, RATE1)


def broadcast_inner_max(
    mu1: float, mu2: float, n1: float, n2: float, power: float, steps: int = 40001
) -> float:
    """Brute-force weighted-rate maximum over all splits of a total power.

    The noisier receiver decodes under the cleaner receiver's power, so its
    rate is ``0.5*log2(1 + p2/(p1 + n2))``.
    """
    p1 = np.linspace(0.0, power, steps)
    p2 = power - p1
    vals = mu1 * 0.5 * np.log2(1.0 + p1 / n1) + mu2 * 0.5 * np.log2(
        1.0 + p2 / (p1 + n2)
    )
    return float(vals.max())


def battery_content(trace, t: float, left: bool = True) -> float:
    """Stored energy at time t from a simulation trace (left limit default)."""
    if left:
        return trace.usable.eval_left(t) - trace.transmitted.eval_left(t)
    return trace.usable.eval(t) - trace.transmitted.eval(t)


def assert_close(actual: float, expected: float, tol: float, label: str) -> None:
    assert abs(actual - expected) <= tol, (
        f"{label}: {actual!r} differs from {expected!r} by "
        f"{abs(actual - expected):.3e} (tolerance {tol:.1e})"
    )


def chord_slopes(xs: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Slopes of consecutive chords; non-increasing iff the samples are
    concave, whatever the grid spacing."""
    return np.diff(values) / np.diff(xs)


def centered_second_differences(values: np.ndarray) -> np.ndarray:
    return values[2:] - 2.0 * values[1:-1] + values[:-2]


LN2 = math.log(2.0)
