"""Throughput-optimal transmission with a leaky battery.

While the battery holds any charge it loses energy at a constant rate
``epsilon`` on top of what the transmitter draws, so holding energy is
costly.  Idle stretches with an empty battery leak nothing.  The central
quantity is the energy efficiency ``f(p) = r(p) / (p + epsilon)`` — data per
unit of battery drain — whose unique maximizer ``p_star`` is the preferred
transmit power whenever the deadline is slack.

For several energy packets and a deadline, the optimum is a block
decomposition: repeatedly take the longest prefix of remaining packets whose
running energy-per-time average is minimal, transmit throughout that block at
the constant power that just empties it by its end (or at ``p_star`` if that
is higher, going silent once the battery empties), and recurse.  The battery
is empty at every block boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .curves import (
    CumulativeCurve,
    PiecewiseCurve,
    PowerSchedule,
    from_packet_arrivals,
    merge_times,
)
from .rate import RateFunction, throughput

__all__ = [
    "UNBOUNDED",
    "LeakageProblem",
    "LeakageSolution",
    "LeakageTrace",
    "ThroughputComparison",
    "p_star",
    "solve_single_packet",
    "sufficient_condition_holds",
    "solve_n_packet",
    "simulate",
    "compare_ST_NT",
]

UNBOUNDED = None
"""Sentinel deadline meaning "no deadline": transmission may take forever."""


@dataclass(frozen=True)
class LeakageProblem:
    """Energy packets, a leak rate, a deadline (or UNBOUNDED), and a rate."""

    packets: tuple[tuple[float, float], ...]
    epsilon: float
    deadline: float | None
    rate: RateFunction

    def __post_init__(self) -> None:
        packets = tuple(
            (float(t), float(e)) for t, e in self.packets
        )
        object.__setattr__(self, "packets", packets)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if not packets:
            raise ValueError("at least one energy packet is required")
        if packets[0][0] != 0.0:
            raise ValueError(
                f"the first packet must arrive at t=0, got t={packets[0][0]!r}"
            )
        for (t0, _), (t1, _) in zip(packets, packets[1:]):
            if not t1 > t0:
                raise ValueError("packet arrival times must be strictly increasing")
        for t, e in packets:
            if not e > 0.0:
                raise ValueError(f"packet energies must be positive, got {e!r} at t={t!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise ValueError(f"epsilon must be finite and non-negative, got {self.epsilon!r}")
        if self.deadline is not None:
            deadline = float(self.deadline)
            object.__setattr__(self, "deadline", deadline)
            if not deadline > packets[-1][0]:
                raise ValueError(
                    f"deadline {deadline!r} must exceed the last arrival time "
                    f"{packets[-1][0]!r}"
                )
        elif self.epsilon == 0.0:
            raise ValueError(
                "an unbounded deadline with zero leakage has no optimal "
                "schedule (slower is always better); use a bounded deadline"
            )

    @property
    def total_energy(self) -> float:
        return sum(e for _, e in self.packets)


@dataclass(frozen=True)
class LeakageSolution:
    """Optimal schedule plus its block structure and energy accounting.

    ``block_powers[n]`` is the transmit power used while packet ``n``'s
    interarrival interval is active (packets in the same block share it);
    ``block_boundaries`` are the block start times followed by the final end
    time, and the battery is empty at each of them.  ``transmit_energy`` and
    ``leaked_energy`` sum to the total harvested energy.
    """

    schedule: PowerSchedule
    block_powers: tuple[float, ...]
    block_boundaries: tuple[float, ...]
    total_data: float
    transmit_energy: float
    leaked_energy: float


@dataclass(frozen=True)
class LeakageTrace:
    """Exact piecewise-linear battery bookkeeping for a schedule.

    ``usable`` is harvested minus leaked energy; the battery content at time
    ``t`` is ``usable(t) - transmitted(t)``.  ``infeasible_at`` is the first
    time the schedule demanded power from an empty battery (None if never);
    from that point on the excess demand is ignored so the trace stays
    well-defined.
    """

    transmitted: CumulativeCurve
    leaked: CumulativeCurve
    usable: PiecewiseCurve
    infeasible_at: float | None


@dataclass(frozen=True)
class ThroughputComparison:
    """Best data with packets arriving over time (``d_nt``) versus all energy
    available upfront (``d_st``); the upfront value is never smaller."""

    d_nt: float
    d_st: float


def p_star(rate: RateFunction, epsilon: float) -> float:
    """Unique maximizer of the energy efficiency ``r(p) / (p + epsilon)``.

    For ``epsilon = 0`` the efficiency is highest in the limit of vanishing
    power, so 0.0 is returned exactly.  Otherwise the stationarity residual
    ``r'(p)(p + epsilon) - r(p)`` is positive at 0, strictly decreasing, and
    crosses zero once; bisection on a doubling bracket finds the crossing.
    """
    if not (math.isfinite(epsilon) and epsilon >= 0.0):
        raise ValueError(f"epsilon must be finite and non-negative, got {epsilon!r}")
    if epsilon == 0.0:
        return 0.0

    def residual(p: float) -> float:
        return rate.deriv(p) * (p + epsilon) - rate(p)

    lo, hi = 0.0, 1.0
    while residual(hi) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > 1e30:
            raise ValueError(
                "no efficiency maximum below 1e30; the rate function does "
                "not look strictly concave"
            )
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        r_mid = residual(mid)
        if abs(r_mid) <= 1e-12 * (1.0 + abs(rate(mid))):
            return mid
        if r_mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_single_packet(
    energy: float,
    deadline: float | None,
    rate: RateFunction,
    epsilon: float,
) -> LeakageSolution:
    """Optimal schedule for one packet available at t=0.

    The battery drains at ``p + epsilon`` while transmitting at ``p``, so
    power ``p`` yields ``energy * r(p) / (p + epsilon)`` data; unconstrained,
    the best power is ``p_star``.  A deadline forces at least the constant
    power that just empties the battery in time, ``energy/deadline - epsilon``;
    the optimum transmits at the larger of the two and is silent afterwards.
    """
    if not energy > 0.0:
        raise ValueError(f"energy must be positive, got {energy!r}")
    p_opt = p_star(rate, epsilon)
    if deadline is None:
        if epsilon == 0.0:
            raise ValueError(
                "an unbounded deadline with zero leakage has no optimal "
                "schedule (slower is always better); use a bounded deadline"
            )
        power = p_opt
        duration = energy / (power + epsilon)
        segments: tuple[tuple[float, float, float], ...] = ((0.0, duration, power),)
        boundaries = (0.0, duration)
    else:
        if not deadline > 0.0:
            raise ValueError(f"deadline must be positive, got {deadline!r}")
        slope = energy / deadline - epsilon
        if p_opt >= slope:
            power = p_opt
            duration = min(energy / (power + epsilon), deadline)
        else:
            power = slope
            duration = deadline
        if duration >= deadline * (1.0 - 1e-12):
            duration = deadline
            segments = ((0.0, deadline, power),)
        else:
            segments = ((0.0, duration, power), (duration, deadline, 0.0))
        boundaries = (0.0, deadline)
    return LeakageSolution(
        schedule=PowerSchedule(segments),
        block_powers=(power,),
        block_boundaries=boundaries,
        total_data=duration * float(rate(power)),
        transmit_energy=duration * power,
        leaked_energy=duration * epsilon,
    )


def sufficient_condition_holds(problem: LeakageProblem) -> bool:
    """True when every prefix of packets is at least as energy-dense (energy
    per unit time, measured to the next arrival or the deadline) as the whole
    instance — the regime where packet timing costs nothing."""
    if problem.deadline is None:
        raise ValueError("the sufficient condition is defined for bounded deadlines")
    packets = problem.packets
    deadline = problem.deadline
    total_avg = problem.total_energy / deadline
    cum = 0.0
    for i, (_, e) in enumerate(packets[:-1]):
        cum += e
        if cum / packets[i + 1][0] < total_avg:
            return False
    return True


def _decompose_blocks(
    packets: tuple[tuple[float, float], ...],
    deadline: float | None,
    epsilon: float,
    p_opt: float,
) -> list[tuple[int, int, float, float, float | None]]:
    """Split packets into blocks of (first, last, power, start, end).

    Bounded: the next block is the longest remaining prefix whose running
    energy-per-time average is minimal (ties to the longer prefix), at power
    ``max(p_opt, average - epsilon)``.  Unbounded: one block of everything at
    ``p_opt`` with open end.
    """
    n = len(packets)
    blocks: list[tuple[int, int, float, float, float | None]] = []
    i = 0
    while i < n:
        start_t = packets[i][0]
        if deadline is None:
            blocks.append((i, n - 1, p_opt, start_t, None))
            break
        cum_e = 0.0
        best_k = i
        best_avg = math.inf
        for k in range(i, n):
            cum_e += packets[k][1]
            end_t = packets[k + 1][0] if k + 1 < n else deadline
            avg = cum_e / (end_t - start_t)
            if avg <= best_avg:
                best_avg = avg
                best_k = k
        end_t = packets[best_k + 1][0] if best_k + 1 < n else deadline
        blocks.append((i, best_k, max(p_opt, best_avg - epsilon), start_t, end_t))
        i = best_k + 1
    return blocks


def solve_n_packet(problem: LeakageProblem) -> LeakageSolution:
    """Optimal schedule for staggered packets via block decomposition.

    Within each block the transmitter runs at the block power from every
    moment the battery is non-empty (earliest-transmission convention: silent
    gaps appear only where the battery has emptied before the next arrival),
    and the battery is empty at each block boundary.
    """
    p_opt = p_star(problem.rate, problem.epsilon)
    packets = problem.packets
    blocks = _decompose_blocks(packets, problem.deadline, problem.epsilon, p_opt)
    tol = 1e-12 * max(1.0, problem.total_energy)

    segments: list[tuple[float, float, float]] = []

    def emit(t0: float, t1: float, power: float) -> None:
        if not t1 > t0:
            return
        if segments and segments[-1][1] == t0 and segments[-1][2] == power:
            segments[-1] = (segments[-1][0], t1, power)
        else:
            segments.append((t0, t1, power))

    block_powers = [0.0] * len(packets)
    boundaries = [0.0]
    for first, last, power, start_t, end_t in blocks:
        for j in range(first, last + 1):
            block_powers[j] = power
        drain = power + problem.epsilon
        cur = start_t
        charge = 0.0
        for j in range(first, last + 1):
            t_arrive = packets[j][0]
            cur, charge = _advance(emit, cur, t_arrive, charge, power, drain, tol)
            charge += packets[j][1]
        if end_t is None:
            t_empty = cur + charge / drain
            emit(cur, t_empty, power)
            boundaries.append(t_empty)
        else:
            cur, charge = _advance(emit, cur, end_t, charge, power, drain, tol)
            boundaries.append(end_t)

    schedule = PowerSchedule(tuple(segments))
    transmit_duration = sum(t1 - t0 for t0, t1, p in schedule.segments if p > 0.0)
    return LeakageSolution(
        schedule=schedule,
        block_powers=tuple(block_powers),
        block_boundaries=tuple(boundaries),
        total_data=throughput(schedule, problem.rate),
        transmit_energy=schedule.total_energy,
        leaked_energy=problem.epsilon * transmit_duration,
    )


def _advance(emit, cur, until, charge, power, drain, tol):
    """Run the battery from ``cur`` to ``until`` at the block power, going
    silent when it empties; returns the new (time, charge)."""
    if not until > cur:
        return cur, charge
    if charge <= tol:
        emit(cur, until, 0.0)
        return until, 0.0
    t_empty = cur + charge / drain
    if t_empty < until:
        emit(cur, t_empty, power)
        emit(t_empty, until, 0.0)
        return until, 0.0
    emit(cur, until, power)
    return until, max(charge - (until - cur) * drain, 0.0)


def simulate(schedule: PowerSchedule, problem: LeakageProblem) -> LeakageTrace:
    """Replay a schedule against the leakage dynamics, exactly.

    Event-driven: between packet arrivals and schedule breakpoints the
    battery drains linearly, so empty-crossings are solved in closed form.
    Arrivals are credited before the empty-battery check at the same instant,
    and leakage runs exactly while the battery holds charge.  Demand from an
    empty battery is recorded (first time only) and ignored rather than
    raised, so every schedule yields a complete trace.
    """
    eps = problem.epsilon
    arrivals = dict(problem.packets)
    total = problem.total_energy
    tol = 1e-15 * max(1.0, total)

    end = schedule.end_time
    if problem.deadline is not None:
        horizon = max(problem.deadline, end)
    else:
        # cover every arrival; extended below if charge remains after that
        horizon = max(end, problem.packets[-1][0])
    times = sorted(
        {0.0, horizon}
        | set(arrivals)
        | {t for seg in schedule.segments for t in (seg[0], seg[1])}
    )
    times = [t for t in times if t <= horizon]

    tx_pts = [(0.0, 0.0)]
    lk_pts = [(0.0, 0.0)]
    tx = 0.0
    lk = 0.0
    charge = 0.0
    infeasible_at: float | None = None

    def record(t: float) -> None:
        if t > tx_pts[-1][0]:
            tx_pts.append((t, tx))
            lk_pts.append((t, lk))

    cur = 0.0
    charge += arrivals.get(0.0, 0.0)
    for nxt in times:
        if not nxt > cur:
            continue
        while cur < nxt:
            power = schedule.power_at(cur) if cur < end else 0.0
            if charge > tol:
                rate_out = power + eps
                t_empty = cur + charge / rate_out if rate_out > 0.0 else math.inf
                stop = min(t_empty, nxt)
                dt = stop - cur
                tx += power * dt
                lk += eps * dt
                charge = 0.0 if stop == t_empty else charge - rate_out * dt
                cur = stop
                record(cur)
            else:
                if (
                    power > 1e-9
                    and nxt - cur > 1e-9
                    and infeasible_at is None
                ):
                    infeasible_at = cur
                charge = 0.0
                cur = nxt
                record(cur)
        charge += arrivals.get(nxt, 0.0)
    if problem.deadline is None and charge > tol and eps > 0.0:
        t_drain = cur + charge / eps
        lk += charge
        charge = 0.0
        horizon = t_drain
        record(t_drain)

    if tx_pts[-1][0] < horizon:
        tx_pts.append((horizon, tx))
        lk_pts.append((horizon, lk))
    transmitted = CumulativeCurve(
        tuple((t, v, v) for t, v in tx_pts), horizon
    )
    leaked = CumulativeCurve(tuple((t, v, v) for t, v in lk_pts), horizon)
    harvested = from_packet_arrivals(problem.packets, horizon)
    merged = merge_times(harvested, leaked)
    usable = PiecewiseCurve(
        tuple(
            (
                t,
                harvested.eval_left(t) - leaked.eval_left(t),
                harvested.eval(t) - leaked.eval(t),
            )
            for t in merged
        ),
        horizon,
    )
    return LeakageTrace(
        transmitted=transmitted,
        leaked=leaked,
        usable=usable,
        infeasible_at=infeasible_at,
    )


def compare_ST_NT(problem: LeakageProblem) -> ThroughputComparison:
    """Data achievable with the given arrival times versus with the same
    total energy all available at t=0 (which is never worse)."""
    if problem.deadline is None:
        raise ValueError("the comparison is defined for bounded deadlines")
    d_nt = solve_n_packet(problem).total_data
    d_st = solve_single_packet(
        problem.total_energy, problem.deadline, problem.rate, problem.epsilon
    ).total_data
    return ThroughputComparison(d_nt=d_nt, d_st=d_st)
