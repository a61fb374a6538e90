"""Independent brute-force verifiers for the solvers.

The dynamic programs here know nothing about taut strings or block
decompositions: they quantize energy, enumerate feasible spending paths, and
return the best achievable data.  Their values are certified lower bounds on
the true optimum that converge as the grid refines, which makes them suitable
oracles: a solver that undercuts them is wrong, and a solver they cannot
approach within grid error is wrong too.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .curves import (
    DEFAULT_TOL,
    CumulativeCurve,
    InfeasibleError,
    PowerSchedule,
    merge_times,
    solar_harvest_rate,
    solar_harvested_energy,
    zero_curve,
)
from .leakage import LeakageProblem
from .rate import RateFunction
from .string_solver import _gates

__all__ = [
    "GridSpec",
    "GridInfeasibleError",
    "dp_throughput",
    "dp_leakage_throughput",
    "grid_argmax_f",
    "tangent_root",
    "random_feasible_schedule",
]


class GridInfeasibleError(Exception):
    """The quantized problem has no feasible path (grid artifact, not proof
    that the continuous instance is infeasible)."""


@dataclass(frozen=True)
class GridSpec:
    """Discretization used by the DP oracles.

    ``time_slots`` bounds how many slots the oracle may use; ``energy_levels``
    quantizes cumulative energy (or battery charge); ``power_cap`` bounds the
    per-slot power the DP enumerates — it must be at least the highest power
    an optimal schedule uses, or the oracle undershoots.
    """

    time_slots: int = 400
    energy_levels: int = 400
    power_cap: float = 64.0

    def __post_init__(self) -> None:
        if self.time_slots < 2:
            raise ValueError("time_slots must be at least 2")
        if self.energy_levels < 2:
            raise ValueError("energy_levels must be at least 2")
        if not self.power_cap > 0:
            raise ValueError("power_cap must be positive")


def dp_throughput(
    harvested: CumulativeCurve,
    minimum: CumulativeCurve,
    rate: RateFunction,
    grid: GridSpec,
) -> float:
    """Best data of any quantized spending path inside the corridor.

    Slot boundaries are the merged breakpoints of both envelopes: inside each
    piece the corridor is linear, so averaging a feasible spending curve over
    the piece keeps it feasible and (by concavity of the rate) never loses
    data — per-piece constant power is without loss of optimality, and finer
    time slicing would only add quantization noise.  ``time_slots`` therefore
    acts as a capacity guard for the number of corridor pieces.
    """
    times = merge_times(harvested, minimum)
    if len(times) - 1 > grid.time_slots:
        raise GridInfeasibleError(
            f"instance has {len(times) - 1} corridor pieces, more than the "
            f"{grid.time_slots} allowed time slots"
        )
    horizon = harvested.horizon
    end_value = harvested.eval_left(horizon)
    if minimum.eval(0.0) > DEFAULT_TOL:
        raise InfeasibleError("the floor is positive at t=0")
    if end_value <= DEFAULT_TOL:
        return 0.0

    levels = grid.energy_levels
    de = end_value / (levels - 1)
    value = np.full(levels, -np.inf)
    value[0] = 0.0

    for t0, t1 in zip(times, times[1:]):
        dt = t1 - t0
        if t1 == horizon:
            lo_l = hi_l = levels - 1
        else:
            hi = harvested.eval_left(t1)
            lo = min(minimum.eval(t1), end_value)
            hi_l = min(int(math.floor(hi / de + 1e-9)), levels - 1)
            lo_l = max(int(math.ceil(lo / de - 1e-9)), 0)
            if lo_l > hi_l:
                raise GridInfeasibleError(
                    f"quantized corridor is empty at t={t1:g} "
                    f"(floor {lo:g}, ceiling {hi:g}, level size {de:g})"
                )
        dmax = min(hi_l, int(math.floor(grid.power_cap * dt / de + 1e-9)))
        gains = dt * np.asarray(
            rate(np.arange(dmax + 1) * (de / dt)), dtype=float
        )
        padded = np.concatenate([np.full(dmax, -np.inf), value[: hi_l + 1]])
        windows = np.lib.stride_tricks.sliding_window_view(padded, dmax + 1)
        new = np.full(levels, -np.inf)
        new[: hi_l + 1] = np.max(windows + gains[::-1], axis=1)
        new[:lo_l] = -np.inf
        value = new

    best = value[levels - 1]
    if not np.isfinite(best):
        raise GridInfeasibleError(
            "no quantized path reaches the endpoint (power cap too small or "
            "corridor too tight for the grid)"
        )
    return float(best)


def dp_leakage_throughput(problem: LeakageProblem, grid: GridSpec) -> float:
    """Best data of any quantized schedule under battery leakage.

    State is the battery charge in units of ``total energy / (levels - 1)``.
    Slots are the packet arrivals plus a uniform fill.  Within a slot the
    battery is credited with arrivals, a spend is chosen, and then the leak
    for the slot is subtracted (clamped at empty) — the leak-after-spend
    convention; leak quantization is spread by a global fractional
    accumulator so the drift stays within one unit per busy period.
    """
    if problem.deadline is None:
        raise ValueError("the leakage DP needs a bounded deadline")
    horizon = problem.deadline
    total = sum(e for _, e in problem.packets)
    levels = grid.energy_levels
    db = total / (levels - 1)

    arrival_units: dict[float, int] = {}
    for t, e in problem.packets:
        units = int(math.floor(e / db + 1e-9))
        if units == 0:
            raise GridInfeasibleError(
                f"grid too coarse: packet of {e:g} at t={t:g} is below one "
                f"energy level ({db:g})"
            )
        arrival_units[t] = units

    fill = max(32, min(grid.time_slots, levels) // 4)
    boundaries = sorted(
        {horizon * i / fill for i in range(fill + 1)}
        | set(arrival_units)
        | {horizon}
    )
    if len(boundaries) - 1 > grid.time_slots:
        raise GridInfeasibleError(
            f"{len(boundaries) - 1} slots exceed the {grid.time_slots} allowed"
        )

    value = np.full(levels, -np.inf)
    value[0] = 0.0
    leak_acc = 0.0
    for t0, t1 in zip(boundaries, boundaries[1:]):
        dt = t1 - t0
        credit = arrival_units.get(t0, 0)
        if credit:
            shifted = np.full(levels, -np.inf)
            shifted[credit:] = value[: levels - credit]
            value = shifted
        new_acc = leak_acc + problem.epsilon * dt / db
        leak = int(math.floor(new_acc + 1e-12)) - int(math.floor(leak_acc + 1e-12))
        leak_acc = new_acc
        dmax = int(math.floor(grid.power_cap * dt / db + 1e-9))
        powers = np.arange(dmax + 1) * (db / dt)
        gains = dt * np.asarray(problem.rate(powers), dtype=float)
        new = np.full(levels, -np.inf)
        for d in range(dmax + 1):
            src = d + leak
            if src < levels:
                np.maximum(
                    new[: levels - src], value[src:] + gains[d], out=new[: levels - src]
                )
            # sources that can afford the spend but not the full leak end empty
            bucket = value[d : min(src, levels)]
            if bucket.size:
                new[0] = max(new[0], bucket.max() + gains[d])
        value = new

    return float(value.max())


def grid_argmax_f(
    rate: RateFunction,
    epsilon: float,
    p_max: float = 100.0,
    samples: int = 4096,
) -> float:
    """Grid maximizer of the energy efficiency f(p) = r(p) / (p + epsilon)."""
    if samples < 100:
        raise ValueError("samples must be at least 100")
    powers = np.geomspace(p_max * 1e-9, p_max, samples)
    f = np.asarray(rate(powers), dtype=float) / (powers + epsilon)
    return float(powers[int(np.argmax(f))])


def tangent_root(deadline: float) -> float:
    """Departure point of the solar optimum: where the remaining-time chord
    slope equals the harvest rate, ``h(a) * (T - a) = H(T) - H(a)``.

    The root is meaningful only for deadlines past the harvest peak (the
    curve is convex before it, so the optimum never leaves the ceiling
    early); the chord function changes sign exactly once, between sunrise
    and the peak.
    """
    if not 6.0 < deadline <= 18.0:
        raise ValueError(f"deadline must lie in (6, 18], got {deadline}")

    h_end = solar_harvested_energy(deadline)

    def g(a: float) -> float:
        return solar_harvest_rate(a) * (deadline - a) - (
            h_end - solar_harvested_energy(a)
        )

    lo, hi = 6.0 + 1e-9, min(12.0, deadline)
    if not (g(lo) < 0.0 < g(hi)):
        raise ValueError(
            f"no sign change on ({lo:g}, {hi:g}): the optimum follows the "
            "harvest curve to the deadline, there is no departure point"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_feasible_schedule(
    harvested: CumulativeCurve,
    minimum: CumulativeCurve | None = None,
    seed: int = 0,
    interior_points: int = 3,
) -> PowerSchedule:
    """Seeded random feasible schedule spending everything by the horizon.

    Used for dominance sweeps: any feasible schedule's throughput must be
    bounded by the taut-string optimum.
    """
    if minimum is None:
        minimum = zero_curve(harvested.horizon)
    _gates(harvested, minimum, DEFAULT_TOL)  # raises InfeasibleError if unusable
    rng = random.Random(seed)
    horizon = harvested.horizon
    end_value = harvested.eval_left(horizon)
    knots = sorted(
        set(merge_times(harvested, minimum))
        | {rng.uniform(0.0, horizon) for _ in range(interior_points)}
    )
    points = [(0.0, 0.0)]
    prev = 0.0
    for t in knots:
        if t in (0.0, horizon):
            continue
        lo = max(min(minimum.eval(t), end_value), prev)
        hi = max(min(harvested.eval_left(t), end_value), lo)
        prev = rng.uniform(lo, hi)
        points.append((t, prev))
    points.append((horizon, end_value))
    segments = tuple(
        (t0, t1, (v1 - v0) / (t1 - t0))
        for (t0, v0), (t1, v1) in zip(points, points[1:])
    )
    return PowerSchedule(segments)
