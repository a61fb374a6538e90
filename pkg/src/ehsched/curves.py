"""Piecewise-linear cumulative energy curves and power schedules.

Everything in this package is stated in terms of cumulative energy: a
*harvested* curve gives the total energy that has arrived by each instant, a
*spending* curve gives the total energy already transmitted, and a *minimum*
curve encodes how much must have been spent by each instant (a finite battery
overflows, a dying battery loses its charge).  A spending curve is feasible
when it stays between the minimum floor and the harvested ceiling.

Curves are piecewise linear with explicit left/right values at breakpoints so
that packet arrivals are represented as exact jumps rather than steep ramps.
Curves are right-continuous: ``eval(t)`` returns the post-jump value and
``eval_left(t)`` the pre-jump limit.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

__all__ = [
    "InfeasibleError",
    "PiecewiseCurve",
    "CumulativeCurve",
    "BatterySchedule",
    "PowerSchedule",
    "FeasibilityReport",
    "from_packet_arrivals",
    "integrate_rate",
    "zero_curve",
    "min_energy_from_battery",
    "dying_battery_scenario",
    "merge_times",
    "check_feasible",
    "solar_harvest_rate",
    "solar_harvested_energy",
]

#: Absolute tolerance (energy units) for feasibility / contact comparisons.
DEFAULT_TOL = 1e-9


class InfeasibleError(ValueError):
    """No feasible spending curve exists for the given constraints."""


@dataclass(frozen=True)
class PiecewiseCurve:
    """A piecewise-linear function on [0, horizon] with upward/downward jumps.

    ``breakpoints`` is an ordered tuple of ``(t, v_left, v_right)``.  Between
    breakpoints the curve interpolates linearly from one breakpoint's
    ``v_right`` to the next one's ``v_left``.
    """

    breakpoints: tuple[tuple[float, float, float], ...]
    horizon: float

    def __post_init__(self) -> None:
        bps = tuple(
            (float(t), float(vl), float(vr)) for t, vl, vr in self.breakpoints
        )
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "horizon", float(self.horizon))
        if self.horizon <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if len(bps) < 2:
            raise ValueError("a curve needs breakpoints at 0 and at the horizon")
        if bps[0][0] != 0.0:
            raise ValueError(f"first breakpoint must be at t=0, got t={bps[0][0]}")
        if bps[-1][0] != self.horizon:
            raise ValueError(
                f"last breakpoint must be at the horizon {self.horizon}, "
                f"got t={bps[-1][0]}"
            )
        for (t0, _, _), (t1, _, _) in zip(bps, bps[1:]):
            if not t1 > t0:
                raise ValueError(f"breakpoint times must strictly increase at t={t1}")

    @cached_property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _, _ in self.breakpoints)

    def _locate(self, t: float) -> float:
        tol = DEFAULT_TOL * max(1.0, abs(self.horizon))
        if t < -tol or t > self.horizon + tol:
            raise ValueError(f"t={t} outside the curve domain [0, {self.horizon}]")
        return min(max(t, 0.0), self.horizon)

    def eval(self, t: float) -> float:
        """Value at ``t`` (the right limit at a jump)."""
        t = self._locate(t)
        i = bisect_right(self.times, t) - 1
        t0, _, v0 = self.breakpoints[i]
        if t == t0 or i == len(self.breakpoints) - 1:
            return v0
        t1, v1, _ = self.breakpoints[i + 1]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def eval_left(self, t: float) -> float:
        """Left limit at ``t`` (equals ``eval`` away from jumps)."""
        t = self._locate(t)
        i = bisect_right(self.times, t) - 1
        t0, vl0, v0 = self.breakpoints[i]
        if t == t0:
            return vl0
        t1, v1, _ = self.breakpoints[i + 1]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def jumps(self) -> tuple[tuple[float, float, float], ...]:
        """Breakpoints where the left and right values differ."""
        return tuple(bp for bp in self.breakpoints if bp[1] != bp[2])


class CumulativeCurve(PiecewiseCurve):
    """A non-decreasing, non-negative :class:`PiecewiseCurve` with upward jumps."""

    def __post_init__(self) -> None:
        super().__post_init__()
        scale = max(1.0, abs(self.breakpoints[-1][2]))
        slack = DEFAULT_TOL * scale
        for t, vl, vr in self.breakpoints:
            if vl < -slack or vr < -slack:
                raise ValueError(f"cumulative curve is negative at t={t}")
            if vl > vr + slack:
                raise ValueError(f"downward jump at t={t} ({vl} -> {vr})")
        for (t0, _, v0), (t1, v1, _) in zip(self.breakpoints, self.breakpoints[1:]):
            if v1 < v0 - slack:
                raise ValueError(f"cumulative curve decreases on [{t0}, {t1}]")


@dataclass(frozen=True)
class BatterySchedule:
    """Piecewise-linear, continuous battery capacity profile on [0, horizon]."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        knots = tuple((float(t), float(c)) for t, c in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise ValueError("a battery profile needs knots at 0 and at the horizon")
        if knots[0][0] != 0.0:
            raise ValueError("battery profile must start at t=0")
        for (t0, _), (t1, _) in zip(knots, knots[1:]):
            if not t1 > t0:
                raise ValueError(f"battery knot times must strictly increase at t={t1}")
        for t, c in knots:
            if c < 0:
                raise ValueError(f"battery capacity is negative at t={t}")

    @classmethod
    def constant(cls, capacity: float, horizon: float) -> "BatterySchedule":
        return cls(((0.0, capacity), (float(horizon), capacity)))

    @property
    def horizon(self) -> float:
        return self.knots[-1][0]

    @cached_property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.knots)

    def eval(self, t: float) -> float:
        tol = DEFAULT_TOL * max(1.0, abs(self.horizon))
        if t < -tol or t > self.horizon + tol:
            raise ValueError(f"t={t} outside the battery domain [0, {self.horizon}]")
        t = min(max(t, 0.0), self.horizon)
        i = bisect_right(self.times, t) - 1
        if i == len(self.knots) - 1:
            return self.knots[-1][1]
        t0, c0 = self.knots[i]
        t1, c1 = self.knots[i + 1]
        if t == t0:
            return c0
        return c0 + (c1 - c0) * (t - t0) / (t1 - t0)


@dataclass(frozen=True)
class PowerSchedule:
    """Piecewise-constant transmit power: contiguous ``(t_start, t_end, power)``."""

    segments: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        segs = []
        for t0, t1, p in self.segments:
            t0, t1, p = float(t0), float(t1), float(p)
            if p < -DEFAULT_TOL:
                raise ValueError(f"negative power {p} on [{t0}, {t1}]")
            segs.append((t0, t1, max(p, 0.0)))
        if not segs:
            raise ValueError("a schedule needs at least one segment")
        if segs[0][0] != 0.0:
            raise ValueError("schedule must start at t=0")
        for (_, e0, _), (s1, _, _) in zip(segs, segs[1:]):
            if e0 != s1:
                raise ValueError(f"segments must be contiguous: gap at t={e0}")
        for t0, t1, _ in segs:
            if not t1 > t0:
                raise ValueError(f"empty segment at t={t0}")
        object.__setattr__(self, "segments", tuple(segs))

    @classmethod
    def constant(cls, power: float, duration: float) -> "PowerSchedule":
        return cls(((0.0, float(duration), float(power)),))

    @property
    def end_time(self) -> float:
        return self.segments[-1][1]

    @property
    def total_energy(self) -> float:
        return sum((t1 - t0) * p for t0, t1, p in self.segments)

    def energy_at(self, t: float) -> float:
        """Cumulative energy spent by time ``t``."""
        total = 0.0
        for t0, t1, p in self.segments:
            if t <= t0:
                break
            total += (min(t, t1) - t0) * p
        return total

    def power_at(self, t: float) -> float:
        """Power in effect at time ``t`` (right-continuous; 0 past the end)."""
        for t0, t1, p in self.segments:
            if t0 <= t < t1:
                return p
        return self.segments[-1][2] if t == self.end_time else 0.0

    def energy_curve(self, horizon: float | None = None) -> CumulativeCurve:
        """The continuous cumulative-energy curve induced by the schedule."""
        horizon = self.end_time if horizon is None else float(horizon)
        if horizon < self.end_time:
            raise ValueError("horizon shorter than the schedule")
        bps = [(0.0, 0.0, 0.0)]
        total = 0.0
        for t0, t1, p in self.segments:
            total += (t1 - t0) * p
            bps.append((t1, total, total))
        if horizon > self.end_time:
            bps.append((horizon, total, total))
        return CumulativeCurve(tuple(bps), horizon)


# --------------------------------------------------------------------------
# builders


def from_packet_arrivals(
    packets: Iterable[tuple[float, float]], horizon: float
) -> CumulativeCurve:
    """Staircase curve for discrete energy packets ``(arrival time, energy)``."""
    horizon = float(horizon)
    pts = [(float(t), float(e)) for t, e in packets]
    for (t0, _), (t1, _) in zip(pts, pts[1:]):
        if not t1 > t0:
            raise ValueError(f"packet arrival times must strictly increase at t={t1}")
    bps: list[tuple[float, float, float]] = []
    total = 0.0
    for t, e in pts:
        if e <= 0:
            raise ValueError(f"packet energy must be positive, got {e} at t={t}")
        if t < 0 or t > horizon:
            raise ValueError(f"packet at t={t} outside [0, {horizon}]")
        bps.append((t, total, total + e))
        total += e
    if not bps or bps[0][0] > 0.0:
        bps.insert(0, (0.0, 0.0, 0.0))
    if bps[-1][0] < horizon:
        bps.append((horizon, total, total))
    return CumulativeCurve(tuple(bps), horizon)


def zero_curve(horizon: float) -> CumulativeCurve:
    return CumulativeCurve(((0.0, 0.0, 0.0), (float(horizon), 0.0, 0.0)), horizon)


def integrate_rate(
    rate_fn: Callable[[float], float],
    horizon: float,
    resolution: int = 1024,
    subsamples: int = 32,
) -> CumulativeCurve:
    """Cumulative integral of a non-negative rate function on a uniform grid.

    Each of the ``resolution`` cells is integrated by a composite trapezoid
    rule over ``subsamples`` sub-intervals, so grid-point values are accurate
    to O((horizon/(resolution*subsamples))^2).
    """
    horizon = float(horizon)
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    if subsamples < 1:
        raise ValueError("subsamples must be at least 1")
    bps = [(0.0, 0.0, 0.0)]
    total = 0.0
    width = horizon / (resolution * subsamples)
    prev_v = _checked_rate(rate_fn, 0.0)
    for i in range(resolution):
        cell = 0.0
        for j in range(subsamples):
            t = horizon * (i * subsamples + j + 1) / (resolution * subsamples)
            v = _checked_rate(rate_fn, t)
            cell += 0.5 * (prev_v + v) * width
            prev_v = v
        total += cell
        edge = horizon * (i + 1) / resolution
        bps.append((edge, total, total))
    return CumulativeCurve(tuple(bps), horizon)


def _checked_rate(rate_fn: Callable[[float], float], t: float) -> float:
    v = float(rate_fn(t))
    if v < -1e-12:
        raise ValueError(f"harvest rate is negative at t={t}: {v}")
    return max(v, 0.0)


def min_energy_from_battery(
    harvested: CumulativeCurve, battery: BatterySchedule
) -> CumulativeCurve:
    """Minimum-spend curve for a finite battery: energy that would otherwise
    overflow must already have been transmitted.

    Returns the running maximum over ``s <= t`` of ``max(H(s) - b(s), 0)``,
    which is the tightest non-decreasing floor implied by the pointwise
    overflow constraint.
    """
    if battery.horizon != harvested.horizon:
        raise ValueError(
            f"battery horizon {battery.horizon} != curve horizon {harvested.horizon}"
        )

    def deficit(t: float, left: bool) -> float:
        h = harvested.eval_left(t) if left else harvested.eval(t)
        return h - battery.eval(t)

    times = sorted({*harvested.times, *battery.times})
    # Insert zero crossings of the unclamped deficit so each piece is linear
    # even after clamping at zero.
    refined = [times[0]]
    for a, c in zip(times, times[1:]):
        da, dc = deficit(a, False), deficit(c, True)
        if (da > 0.0) != (dc > 0.0) and da != dc:
            tc = a + (c - a) * (0.0 - da) / (dc - da)
            if a < tc < c:
                refined.append(tc)
        refined.append(c)

    d0_left = max(deficit(0.0, True), 0.0)
    cur = max(d0_left, max(deficit(0.0, False), 0.0))
    bps = [(0.0, d0_left, cur)]
    for a, c in zip(refined, refined[1:]):
        da = max(deficit(a, False), 0.0)
        dc = max(deficit(c, True), 0.0)
        if dc > cur:
            if da < cur:
                # the deficit overtakes the running max inside the piece
                ua, uc = deficit(a, False), deficit(c, True)
                tc = a + (c - a) * (cur - ua) / (uc - ua)
                if a < tc < c:
                    bps.append((tc, cur, cur))
            left = dc
        else:
            left = cur
        new = max(left, max(deficit(c, False), 0.0))
        bps.append((c, left, new))
        cur = new
    return CumulativeCurve(tuple(bps), harvested.horizon)


def dying_battery_scenario(
    amounts: Sequence[float], times: Sequence[float]
) -> tuple[CumulativeCurve, CumulativeCurve]:
    """Corridor for a bank of batteries whose charge dies at known times.

    All energy is present from t=0 (``H`` constant at the total), and each
    death time forces the cumulative spend up by the dying amount (``M`` is a
    staircase).  The horizon is the last death time.
    """
    if len(amounts) == 0:
        raise ValueError("at least one battery is required")
    if len(amounts) != len(times):
        raise ValueError("amounts and times must have equal length")
    for a in amounts:
        if a <= 0:
            raise ValueError(f"battery charge must be positive, got {a}")
    for (t0, t1) in zip(times, times[1:]):
        if not t1 > t0:
            raise ValueError("death times must strictly increase")
    if times[0] <= 0:
        raise ValueError("death times must be positive")
    horizon = float(times[-1])
    total = float(sum(amounts))
    harvested = from_packet_arrivals([(0.0, total)], horizon)
    minimum = from_packet_arrivals(list(zip(times, amounts)), horizon)
    return harvested, minimum


def merge_times(*curves: PiecewiseCurve | BatterySchedule) -> tuple[float, ...]:
    """Sorted union of breakpoint times of several curves."""
    merged: set[float] = set()
    for c in curves:
        merged.update(c.times)
    return tuple(sorted(merged))


# --------------------------------------------------------------------------
# feasibility


@dataclass(frozen=True)
class FeasibilityReport:
    """Worst constraint violations of a schedule against a corridor."""

    feasible: bool
    max_overdraw: float  #: max of spent - harvested (> 0 spends unseen energy)
    overdraw_time: float | None
    max_shortfall: float  #: max of minimum - spent (> 0 misses forced spending)
    shortfall_time: float | None


def check_feasible(
    schedule: PowerSchedule,
    minimum: CumulativeCurve,
    harvested: CumulativeCurve,
    tol: float = DEFAULT_TOL,
) -> FeasibilityReport:
    """Check ``minimum <= spent <= harvested`` over the whole horizon.

    All three objects are piecewise linear, so comparing left and right
    limits at the merged breakpoints is exact.
    """
    spent = schedule.energy_curve(harvested.horizon)
    over, over_t = 0.0, None
    short, short_t = 0.0, None
    for t in merge_times(spent, minimum, harvested):
        for side in (True, False):
            e = spent.eval_left(t) if side else spent.eval(t)
            h = harvested.eval_left(t) if side else harvested.eval(t)
            m = minimum.eval_left(t) if side else minimum.eval(t)
            if e - h > over:
                over, over_t = e - h, t
            if m - e > short:
                short, short_t = m - e, t
    return FeasibilityReport(
        feasible=(over <= tol and short <= tol),
        max_overdraw=over,
        overdraw_time=over_t,
        max_shortfall=short,
        shortfall_time=short_t,
    )


# --------------------------------------------------------------------------
# the solar harvest model


def solar_harvest_rate(t: float) -> float:
    """Bell-shaped daytime harvest rate: 5 - (5/36)(t-12)^2 on [6, 18], else 0."""
    if t < 6.0 or t > 18.0:
        return 0.0
    return 5.0 - (5.0 / 36.0) * (t - 12.0) ** 2


def solar_harvested_energy(t: float) -> float:
    """Closed-form integral of :func:`solar_harvest_rate` from 0 to ``t``."""
    if t <= 6.0:
        return 0.0
    t = min(t, 18.0)
    return 5.0 * (t - 6.0) - (5.0 / 108.0) * ((t - 12.0) ** 3 + 216.0)
