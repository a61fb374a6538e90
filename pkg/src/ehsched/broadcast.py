"""Two-receiver downlink scheduling via reduction to a single-user problem.

One transmitter sends superposed signals to two receivers over Gaussian
channels with different noise levels.  The cleaner receiver decodes and
removes the weaker receiver's signal first, so for a total power ``p`` split
as ``p1 + p2`` the achievable rates are::

    r1 = 1/2 log2(1 + p1 / noise1)              (cleaner channel)
    r2 = 1/2 log2(1 + p2 / (p1 + noise2))       (noisier channel)

Maximizing a weighted sum of delivered data decouples: the best split of any
total power ``p`` depends only on the weights and noises (a threshold rule),
and plugging that split back in yields a single strictly concave "composite"
rate of total power.  The energy-schedule geometry is therefore exactly the
single-user taut string, and the per-user schedules follow by splitting each
constant-power segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import CumulativeCurve, PowerSchedule
from .rate import _LN2, RateFunction, awgn_rate
from .string_solver import StringSolution, taut_string

__all__ = [
    "PowerSplitRule",
    "BroadcastProblem",
    "BroadcastSolution",
    "power_threshold",
    "composite_rate",
    "split_power",
    "solve_broadcast",
]

_KINDS = ("user1_only", "user2_only", "threshold")


@dataclass(frozen=True)
class PowerSplitRule:
    """How total power is divided between the receivers.

    ``user1_only`` / ``user2_only`` give everything to one receiver;
    ``threshold`` gives user 1 the first ``threshold`` units of power and
    user 2 the rest.
    """

    kind: str
    threshold: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "threshold", float(self.threshold))
        if self.kind == "threshold" and not self.threshold >= 0.0:
            raise ValueError("threshold must be non-negative")


def _check_weights(mu1: float, mu2: float, noise1: float, noise2: float) -> None:
    if not (noise2 > noise1 > 0.0):
        raise ValueError(
            f"noise powers must satisfy noise2 > noise1 > 0, got "
            f"noise1={noise1!r}, noise2={noise2!r}"
        )
    if mu1 < 0.0 or mu2 < 0.0 or (mu1 == 0.0 and mu2 == 0.0):
        raise ValueError("weights must be non-negative and not both zero")


def power_threshold(
    mu1: float, mu2: float, noise1: float, noise2: float
) -> PowerSplitRule:
    """Optimal power-split rule for the weighted two-receiver objective.

    With the weight ratio ``mu2 / mu1``: at or below 1 the cleaner receiver
    is worth more per unit power at every level, so it gets everything; above
    ``noise2 / noise1`` the noisier receiver always wins; in between, the
    cleaner receiver is preferred up to the crossover power
    ``(noise2 - ratio * noise1) / (ratio - 1)`` and the remainder goes to the
    noisier one.
    """
    _check_weights(mu1, mu2, noise1, noise2)
    if mu2 == 0.0 or (mu1 > 0.0 and mu2 / mu1 <= 1.0):
        return PowerSplitRule("user1_only")
    if mu1 == 0.0 or mu2 / mu1 > noise2 / noise1:
        return PowerSplitRule("user2_only")
    ratio = mu2 / mu1
    return PowerSplitRule("threshold", (noise2 - ratio * noise1) / (ratio - 1.0))


def composite_rate(
    mu1: float, mu2: float, noise1: float, noise2: float
) -> RateFunction:
    """Weighted data per unit time as a function of total power, with the
    power split optimally between the receivers.

    Only defined in the genuinely shared regime ``1 < mu2/mu1 <= noise2/noise1``
    (outside it one receiver gets all power and the plain single-user rate,
    scaled by its weight, should be used instead).  The result is strictly
    concave and differentiable, including at the crossover power.
    """
    _check_weights(mu1, mu2, noise1, noise2)
    if mu1 == 0.0 or not 1.0 < mu2 / mu1 <= noise2 / noise1:
        raise ValueError(
            "composite_rate needs 1 < mu2/mu1 <= noise2/noise1; outside that "
            "range all power goes to a single receiver"
        )
    ratio = mu2 / mu1
    p_th = (noise2 - ratio * noise1) / (ratio - 1.0)

    def value(power):
        p = np.asarray(power, dtype=float)
        p1 = np.minimum(p, p_th)
        p2 = np.maximum(p - p_th, 0.0)
        out = 0.5 * mu1 * np.log2(1.0 + p1 / noise1) + 0.5 * mu2 * np.log2(
            1.0 + p2 / (p_th + noise2)
        )
        return float(out) if np.ndim(power) == 0 else out

    def deriv(power):
        p = np.asarray(power, dtype=float)
        out = np.where(
            p <= p_th,
            mu1 / (2.0 * _LN2 * (noise1 + p)),
            mu2 / (2.0 * _LN2 * (noise2 + p)),
        )
        return float(out) if np.ndim(power) == 0 else out

    return RateFunction(
        value=value,
        deriv_fn=deriv,
        descriptor={
            "type": "broadcast_composite",
            "mu1": float(mu1),
            "mu2": float(mu2),
            "noise1": float(noise1),
            "noise2": float(noise2),
            "threshold": p_th,
        },
    )


def split_power(power: float, rule: PowerSplitRule) -> tuple[float, float]:
    """Divide a total power between the receivers according to the rule."""
    if power < 0.0:
        raise ValueError(f"power must be non-negative, got {power!r}")
    if rule.kind == "user1_only":
        return power, 0.0
    if rule.kind == "user2_only":
        return 0.0, power
    p1 = min(power, rule.threshold)
    return p1, power - p1


@dataclass(frozen=True)
class BroadcastProblem:
    """Weighted two-receiver instance over a harvest/floor corridor."""

    noise1: float
    noise2: float
    mu1: float
    mu2: float
    harvested: CumulativeCurve
    minimum: CumulativeCurve | None = None

    def __post_init__(self) -> None:
        _check_weights(self.mu1, self.mu2, self.noise1, self.noise2)


@dataclass(frozen=True)
class BroadcastSolution:
    """Per-user schedules and data for a solved broadcast instance.

    ``user1_data`` and ``user2_data`` are unweighted bits; ``weighted_sum``
    is ``mu1 * user1_data + mu2 * user2_data``, the maximized objective.
    """

    total_schedule: PowerSchedule
    user1_schedule: PowerSchedule
    user2_schedule: PowerSchedule
    user1_data: float
    user2_data: float
    weighted_sum: float
    split_rule: PowerSplitRule
    string: StringSolution


def _scaled_rate(base: RateFunction, weight: float) -> RateFunction:
    """Weight-scaled copy of a rate (scaling preserves strict concavity)."""

    def value(power):
        return weight * base.value(power)

    def deriv(power):
        return weight * base.deriv_fn(power)

    descriptor = dict(base.descriptor)
    descriptor["scaled_by"] = float(weight)
    return RateFunction(value=value, deriv_fn=deriv, descriptor=descriptor)


def solve_broadcast(problem: BroadcastProblem) -> BroadcastSolution:
    """Maximize the weighted delivered data over both receivers.

    The cumulative total-energy curve of the optimum never depends on the
    (strictly concave) rate, so the taut string on the corridor gives the
    total schedule; each segment's power is then split by the threshold rule
    and the per-user data follow from the single-user rate formulas.
    """
    rule = power_threshold(
        problem.mu1, problem.mu2, problem.noise1, problem.noise2
    )
    if rule.kind == "user1_only":
        base = awgn_rate(problem.noise1)
        effective = _scaled_rate(base, problem.mu1)
    elif rule.kind == "user2_only":
        base = awgn_rate(problem.noise2)
        effective = _scaled_rate(base, problem.mu2)
    else:
        effective = composite_rate(
            problem.mu1, problem.mu2, problem.noise1, problem.noise2
        )
    string = taut_string(problem.harvested, problem.minimum, rate=effective)

    user1_segments = []
    user2_segments = []
    data1 = 0.0
    data2 = 0.0
    for t0, t1, power in string.schedule.segments:
        p1, p2 = split_power(power, rule)
        user1_segments.append((t0, t1, p1))
        user2_segments.append((t0, t1, p2))
        dt = t1 - t0
        data1 += dt * 0.5 * math.log2(1.0 + p1 / problem.noise1)
        data2 += dt * 0.5 * math.log2(1.0 + p2 / (p1 + problem.noise2))
    return BroadcastSolution(
        total_schedule=string.schedule,
        user1_schedule=PowerSchedule(tuple(user1_segments)),
        user2_schedule=PowerSchedule(tuple(user2_segments)),
        user1_data=data1,
        user2_data=data2,
        weighted_sum=problem.mu1 * data1 + problem.mu2 * data2,
        split_rule=rule,
        string=string,
    )
