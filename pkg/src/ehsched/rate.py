"""Concave rate laws mapping transmit power to data rate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .curves import PowerSchedule

__all__ = ["RateFunction", "awgn_rate", "throughput"]

_LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class RateFunction:
    """A strictly concave, strictly increasing rate law with r(0) = 0.

    ``value`` and ``deriv_fn`` accept scalars or numpy arrays of non-negative
    powers.  ``descriptor`` is a JSON-serializable description used in
    reports and scenario files.
    """

    value: Callable[[Any], Any]
    deriv_fn: Callable[[Any], Any]
    descriptor: dict[str, Any] = field(default_factory=dict)

    def __call__(self, power):
        return self.value(power)

    def deriv(self, power):
        return self.deriv_fn(power)


def awgn_rate(noise: float = 1.0) -> RateFunction:
    """Gaussian-channel rate: r(p) = 0.5 * log2(1 + p / noise)."""
    noise = float(noise)
    if noise <= 0:
        raise ValueError(f"noise power must be positive, got {noise}")

    def value(p):
        out = 0.5 * np.log2(1.0 + np.asarray(p, dtype=float) / noise)
        return float(out) if np.ndim(out) == 0 else out

    def deriv(p):
        out = 1.0 / (2.0 * _LN2 * (noise + np.asarray(p, dtype=float)))
        return float(out) if np.ndim(out) == 0 else out

    return RateFunction(value, deriv, {"type": "awgn", "noise": noise})


def throughput(schedule: PowerSchedule, rate: RateFunction) -> float:
    """Total data sent by a piecewise-constant schedule: sum of dt * r(p)."""
    return sum((t1 - t0) * float(rate(p)) for t0, t1, p in schedule.segments)
