"""Command-line interface: scenario files in, reports out.

A scenario is a JSON object::

    {
      "mode": "p2p" | "broadcast" | "leakage",
      "rate": {"type": "awgn", "noise": 1.0},          # optional, this default
      "deadline": 18.0 | "unbounded",                   # "unbounded": leakage only
      "harvest": {"packets": [{"t": 0.0, "e": 4.0}, ...]}
               | {"samples": [v0, v1, ...]}             # uniform rate samples
               | {"named": "solar"},
      "battery": "none"                                 # optional, default none
               | {"constant": 5.0}
               | {"schedule": [{"t": 0.0, "capacity": 5.0}, ...]}
               | {"dying": {"b": [2.0, 2.0], "t": [1.0, 4.0]}},
      "epsilon": 0.5,                                   # leakage mode only
      "broadcast": {"n1": 1.0, "n2": 3.0, "mu1": 1.0, "mu2": 2.0}
    }

``solve`` writes a JSON report (plus CSV schedule and SVG plot), ``verify``
additionally runs the brute-force oracles and records the gap, and ``demo``
runs one of the built-in scenarios.  Exit status: 0 success, 1 invalid
input/arguments, 2 infeasible instance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .broadcast import (
    BroadcastProblem,
    _scaled_rate,
    composite_rate,
    power_threshold,
    solve_broadcast,
)
from .curves import (
    BatterySchedule,
    CumulativeCurve,
    InfeasibleError,
    PiecewiseCurve,
    PowerSchedule,
    from_packet_arrivals,
    integrate_rate,
    min_energy_from_battery,
    solar_harvest_rate,
    zero_curve,
)
from .leakage import (
    LeakageProblem,
    compare_ST_NT,
    simulate,
    solve_n_packet,
    sufficient_condition_holds,
)
from .oracle import (
    GridInfeasibleError,
    GridSpec,
    dp_leakage_throughput,
    dp_throughput,
    random_feasible_schedule,
)
from .rate import RateFunction, awgn_rate, throughput
from .string_solver import StringSolution, taut_string

__all__ = ["main", "DEMO_SCENARIOS", "REPORT_SCHEMA"]

#: Relative oracle-gap tolerances checked by ``verify``.
P2P_GAP_TOLERANCE = 0.005
LEAKAGE_GAP_TOLERANCE = 0.01
DOMINANCE_SWEEPS = 64

DEMO_SCENARIOS: dict[str, dict] = {
    "solar": {
        "mode": "p2p",
        "rate": {"type": "awgn", "noise": 1.0},
        "deadline": 18.0,
        "harvest": {"named": "solar"},
        "battery": "none",
    },
    "dying-battery": {
        "mode": "p2p",
        "rate": {"type": "awgn", "noise": 1.0},
        "deadline": 4.0,
        "harvest": {"packets": [{"t": 0.0, "e": 4.0}]},
        "battery": {"dying": {"b": [2.0, 2.0], "t": [1.0, 4.0]}},
    },
    "broadcast": {
        "mode": "broadcast",
        "deadline": 4.0,
        "harvest": {"packets": [{"t": 0.0, "e": 8.0}]},
        "battery": "none",
        "broadcast": {"n1": 1.0, "n2": 3.0, "mu1": 1.0, "mu2": 2.0},
    },
    "leakage-counterexample": {
        "mode": "leakage",
        "rate": {"type": "awgn", "noise": 1.0},
        "deadline": 4.0,
        "harvest": {"packets": [{"t": 0.0, "e": 4.0}, {"t": 3.0, "e": 4.0}]},
        "epsilon": 0.5,
    },
}

_NUMBER = {"type": "number"}
_SEGMENT = {
    "type": "object",
    "required": ["t_start", "t_end", "power"],
    "properties": {"t_start": _NUMBER, "t_end": _NUMBER, "power": _NUMBER},
}
_SCHEDULE = {
    "type": "object",
    "required": ["segments", "end_time", "total_energy"],
    "properties": {
        "segments": {"type": "array", "items": _SEGMENT, "minItems": 1},
        "end_time": _NUMBER,
        "total_energy": _NUMBER,
    },
}
_CURVE = {
    "type": "object",
    "required": ["horizon", "breakpoints"],
    "properties": {
        "horizon": _NUMBER,
        "breakpoints": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "required": ["t", "v_left", "v_right"],
                "properties": {"t": _NUMBER, "v_left": _NUMBER, "v_right": _NUMBER},
            },
        },
    },
}

#: Structure of the JSON report written by ``solve`` and ``verify``.
REPORT_SCHEMA = {
    "type": "object",
    "required": ["mode", "scenario", "schedule", "total_data", "energy", "curves"],
    "properties": {
        "mode": {"enum": ["p2p", "broadcast", "leakage"]},
        "scenario": {"type": "object"},
        "schedule": _SCHEDULE,
        "user1_schedule": _SCHEDULE,
        "user2_schedule": _SCHEDULE,
        "total_data": _NUMBER,
        "user1_data": _NUMBER,
        "user2_data": _NUMBER,
        "weighted_sum": _NUMBER,
        "block_powers": {"type": "array", "items": _NUMBER},
        "block_boundaries": {"type": "array", "items": _NUMBER},
        "energy": {
            "type": "object",
            "required": ["harvested", "transmitted", "leaked", "residual"],
            "properties": {
                "harvested": _NUMBER,
                "transmitted": _NUMBER,
                "leaked": _NUMBER,
                "residual": _NUMBER,
            },
        },
        "contacts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["time", "value", "kind"],
                "properties": {
                    "time": _NUMBER,
                    "value": _NUMBER,
                    "kind": {"enum": ["start", "upper", "lower", "end"]},
                },
            },
        },
        "departure_time": {"type": ["number", "null"]},
        "curves": {"type": "object", "additionalProperties": _CURVE},
        "comparison": {
            "type": "object",
            "required": ["d_nt", "d_st"],
            "properties": {
                "d_nt": _NUMBER,
                "d_st": _NUMBER,
                "sufficient_condition": {"type": "boolean"},
            },
        },
        "infeasible_at": {"type": ["number", "null"]},
        "verification": {
            "type": "object",
            "required": ["grid", "oracle_data", "solver_data", "relative_gap", "tolerance", "ok"],
            "properties": {
                "grid": {"type": "object"},
                "oracle_data": _NUMBER,
                "solver_data": _NUMBER,
                "relative_gap": _NUMBER,
                "tolerance": _NUMBER,
                "dominance": {"type": "object"},
                "ok": {"type": "boolean"},
            },
        },
    },
}


# --------------------------------------------------------------------------
# scenario -> problem objects


def _build_rate(spec: dict | None) -> RateFunction:
    if spec is None:
        return awgn_rate(1.0)
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError('"rate" must be an object with a "type" field')
    if spec["type"] != "awgn":
        raise ValueError(f'unknown rate type {spec["type"]!r} (supported: "awgn")')
    return awgn_rate(float(spec.get("noise", 1.0)))


def _build_harvest(
    spec: dict, deadline: float, resolution: int
) -> CumulativeCurve:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(
            '"harvest" must be exactly one of {"packets": ...}, '
            '{"samples": ...}, {"named": ...}'
        )
    if "packets" in spec:
        packets = [(float(p["t"]), float(p["e"])) for p in spec["packets"]]
        return from_packet_arrivals(packets, deadline)
    if "samples" in spec:
        samples = [float(v) for v in spec["samples"]]
        if len(samples) < 2:
            raise ValueError('"samples" needs at least two rate values')
        if any(v < 0.0 for v in samples):
            raise ValueError('"samples" rate values must be non-negative')
        bps = [(0.0, 0.0, 0.0)]
        total = 0.0
        width = deadline / (len(samples) - 1)
        for i in range(1, len(samples)):
            total += 0.5 * (samples[i - 1] + samples[i]) * width
            bps.append((i * width, total, total))
        bps[-1] = (deadline, bps[-1][1], bps[-1][2])
        return CumulativeCurve(tuple(bps), deadline)
    if "named" in spec:
        if spec["named"] != "solar":
            raise ValueError(f'unknown named harvest {spec["named"]!r}')
        return integrate_rate(solar_harvest_rate, deadline, resolution)
    raise ValueError(f'unrecognized harvest spec {sorted(spec)!r}')


def _build_minimum(
    spec, harvested: CumulativeCurve, deadline: float
) -> CumulativeCurve:
    if spec in (None, "none"):
        return zero_curve(deadline)
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(
            '"battery" must be "none" or exactly one of {"constant": ...}, '
            '{"schedule": ...}, {"dying": ...}'
        )
    if "constant" in spec:
        cap = float(spec["constant"])
        return min_energy_from_battery(
            harvested, BatterySchedule.constant(cap, deadline)
        )
    if "schedule" in spec:
        knots = tuple((float(k["t"]), float(k["capacity"])) for k in spec["schedule"])
        profile = BatterySchedule(knots)
        if profile.horizon != deadline:
            raise ValueError(
                f"battery schedule must end at the deadline {deadline}, "
                f"got {profile.horizon}"
            )
        return min_energy_from_battery(harvested, profile)
    if "dying" in spec:
        amounts = [float(v) for v in spec["dying"]["b"]]
        times = [float(v) for v in spec["dying"]["t"]]
        if len(amounts) != len(times):
            raise ValueError('"dying" needs equal-length "b" and "t" lists')
        if times and times[-1] > deadline:
            raise ValueError("battery death times must not exceed the deadline")
        return from_packet_arrivals(list(zip(times, amounts)), deadline)
    raise ValueError(f'unrecognized battery spec {sorted(spec)!r}')


def _numeric_deadline(scenario: dict) -> float:
    deadline = scenario.get("deadline")
    if deadline == "unbounded":
        raise ValueError('"unbounded" deadlines are only valid in leakage mode')
    if not isinstance(deadline, (int, float)):
        raise ValueError('"deadline" must be a number')
    return float(deadline)


# --------------------------------------------------------------------------
# solving


class _Solved:
    """Report dict plus the live objects the emitters and verifier need."""

    def __init__(self, report, curves, schedule, contacts=None, departure=None):
        self.report = report
        self.curves = curves  # name -> PiecewiseCurve, drawn in this order
        self.schedule = schedule
        self.contacts = contacts or ()
        self.departure = departure


def _schedule_json(schedule: PowerSchedule) -> dict:
    return {
        "segments": [
            {"t_start": t0, "t_end": t1, "power": p}
            for t0, t1, p in schedule.segments
        ],
        "end_time": schedule.end_time,
        "total_energy": schedule.total_energy,
    }


def _curve_json(curve: PiecewiseCurve) -> dict:
    return {
        "horizon": curve.horizon,
        "breakpoints": [
            {"t": t, "v_left": vl, "v_right": vr} for t, vl, vr in curve.breakpoints
        ],
    }


def _contacts_json(string: StringSolution) -> tuple[list[dict], float | None]:
    contacts = [
        {"time": c.time, "value": c.value, "kind": c.kind} for c in string.contacts
    ]
    uppers = [c.time for c in string.contacts if c.kind == "upper"]
    return contacts, (max(uppers) if uppers else None)


def _solve_p2p(scenario: dict, resolution: int) -> _Solved:
    rate = _build_rate(scenario.get("rate"))
    deadline = _numeric_deadline(scenario)
    harvested = _build_harvest(scenario["harvest"], deadline, resolution)
    minimum = _build_minimum(scenario.get("battery"), harvested, deadline)
    string = taut_string(harvested, minimum, rate=rate)
    contacts, departure = _contacts_json(string)
    arrived = harvested.eval(deadline)
    spent = string.schedule.total_energy
    report = {
        "mode": "p2p",
        "scenario": scenario,
        "schedule": _schedule_json(string.schedule),
        "total_data": string.total_data,
        "contacts": contacts,
        "departure_time": departure,
        "energy": {
            "harvested": arrived,
            "transmitted": spent,
            "leaked": 0.0,
            "residual": arrived - spent,
        },
        "curves": {
            "harvested": _curve_json(harvested),
            "minimum": _curve_json(minimum),
            "spent": _curve_json(string.schedule.energy_curve(deadline)),
        },
    }
    solved = _Solved(
        report,
        {"harvested": harvested, "minimum": minimum,
         "spent": string.schedule.energy_curve(deadline)},
        string.schedule,
        contacts=string.contacts,
        departure=departure,
    )
    solved.rate = rate
    solved.harvested = harvested
    solved.minimum = minimum
    return solved


def _effective_broadcast_rate(problem: BroadcastProblem) -> RateFunction:
    rule = power_threshold(problem.mu1, problem.mu2, problem.noise1, problem.noise2)
    if rule.kind == "user1_only":
        return _scaled_rate(awgn_rate(problem.noise1), problem.mu1)
    if rule.kind == "user2_only":
        return _scaled_rate(awgn_rate(problem.noise2), problem.mu2)
    return composite_rate(problem.mu1, problem.mu2, problem.noise1, problem.noise2)


def _solve_broadcast(scenario: dict) -> _Solved:
    spec = scenario.get("broadcast")
    if not isinstance(spec, dict):
        raise ValueError('broadcast mode needs a "broadcast" object')
    deadline = _numeric_deadline(scenario)
    harvested = _build_harvest(scenario["harvest"], deadline, resolution=1024)
    minimum = _build_minimum(scenario.get("battery"), harvested, deadline)
    problem = BroadcastProblem(
        noise1=float(spec["n1"]),
        noise2=float(spec["n2"]),
        mu1=float(spec["mu1"]),
        mu2=float(spec["mu2"]),
        harvested=harvested,
        minimum=minimum,
    )
    solution = solve_broadcast(problem)
    contacts, departure = _contacts_json(solution.string)
    arrived = harvested.eval(deadline)
    spent = solution.total_schedule.total_energy
    report = {
        "mode": "broadcast",
        "scenario": scenario,
        "schedule": _schedule_json(solution.total_schedule),
        "user1_schedule": _schedule_json(solution.user1_schedule),
        "user2_schedule": _schedule_json(solution.user2_schedule),
        "total_data": solution.weighted_sum,
        "user1_data": solution.user1_data,
        "user2_data": solution.user2_data,
        "weighted_sum": solution.weighted_sum,
        "contacts": contacts,
        "departure_time": departure,
        "energy": {
            "harvested": arrived,
            "transmitted": spent,
            "leaked": 0.0,
            "residual": arrived - spent,
        },
        "curves": {
            "harvested": _curve_json(harvested),
            "minimum": _curve_json(minimum),
            "spent": _curve_json(solution.total_schedule.energy_curve(deadline)),
        },
    }
    solved = _Solved(
        report,
        {"harvested": harvested, "minimum": minimum,
         "spent": solution.total_schedule.energy_curve(deadline)},
        solution.total_schedule,
        contacts=solution.string.contacts,
        departure=departure,
    )
    solved.rate = _effective_broadcast_rate(problem)
    solved.harvested = harvested
    solved.minimum = minimum
    solved.broadcast_solution = solution
    return solved


def _solve_leakage(scenario: dict) -> _Solved:
    rate = _build_rate(scenario.get("rate"))
    harvest = scenario.get("harvest")
    if not (isinstance(harvest, dict) and "packets" in harvest):
        raise ValueError('leakage mode needs {"harvest": {"packets": ...}}')
    if scenario.get("battery") not in (None, "none"):
        raise ValueError("leakage mode does not support battery constraints")
    if "epsilon" not in scenario:
        raise ValueError('leakage mode needs an "epsilon" field')
    deadline = scenario.get("deadline")
    if deadline == "unbounded":
        deadline = None
    elif isinstance(deadline, (int, float)):
        deadline = float(deadline)
    else:
        raise ValueError('"deadline" must be a number or "unbounded"')
    packets = tuple(
        (float(p["t"]), float(p["e"])) for p in harvest["packets"]
    )
    problem = LeakageProblem(
        packets=packets,
        epsilon=float(scenario["epsilon"]),
        deadline=deadline,
        rate=rate,
    )
    solution = solve_n_packet(problem)
    trace = simulate(solution.schedule, problem)
    total = problem.total_energy
    report = {
        "mode": "leakage",
        "scenario": scenario,
        "schedule": _schedule_json(solution.schedule),
        "total_data": solution.total_data,
        "block_powers": list(solution.block_powers),
        "block_boundaries": list(solution.block_boundaries),
        "energy": {
            "harvested": total,
            "transmitted": solution.transmit_energy,
            "leaked": solution.leaked_energy,
            "residual": total - solution.transmit_energy - solution.leaked_energy,
        },
        "infeasible_at": trace.infeasible_at,
        "curves": {
            "harvested": _curve_json(
                from_packet_arrivals(problem.packets, trace.usable.horizon)
            ),
            "usable": _curve_json(trace.usable),
            "leaked": _curve_json(trace.leaked),
            "spent": _curve_json(trace.transmitted),
        },
    }
    if deadline is not None:
        comparison = compare_ST_NT(problem)
        report["comparison"] = {
            "d_nt": comparison.d_nt,
            "d_st": comparison.d_st,
            "sufficient_condition": sufficient_condition_holds(problem),
        }
    solved = _Solved(
        report,
        {
            "harvested": from_packet_arrivals(problem.packets, trace.usable.horizon),
            "usable": trace.usable,
            "spent": trace.transmitted,
            "leaked": trace.leaked,
        },
        solution.schedule,
    )
    solved.rate = rate
    solved.problem = problem
    return solved


def _solve_scenario(scenario: dict, resolution: int) -> _Solved:
    if not isinstance(scenario, dict):
        raise ValueError("a scenario must be a JSON object")
    mode = scenario.get("mode")
    if mode == "p2p":
        return _solve_p2p(scenario, resolution)
    if mode == "broadcast":
        return _solve_broadcast(scenario)
    if mode == "leakage":
        return _solve_leakage(scenario)
    raise ValueError(
        f'unknown mode {mode!r} (expected "p2p", "broadcast", or "leakage")'
    )


# --------------------------------------------------------------------------
# verification


def _verify(solved: _Solved, grid_arg: str, seed: int) -> dict:
    time_slots, energy_levels = _parse_grid(grid_arg)
    max_power = max(p for _, _, p in solved.schedule.segments)
    cap = 4.0 * max(max_power, 0.25) + 1.0
    grid = GridSpec(time_slots, energy_levels, cap)
    mode = solved.report["mode"]
    solver_data = solved.report["total_data"]
    result: dict = {
        "grid": {
            "time_slots": time_slots,
            "energy_levels": energy_levels,
            "power_cap": cap,
        },
        "solver_data": solver_data,
    }
    tiny = 1e-9 * max(1.0, abs(solver_data))
    if mode == "leakage":
        if solved.problem.deadline is None:
            raise ValueError("verify needs a bounded deadline in leakage mode")
        oracle = dp_leakage_throughput(solved.problem, grid)
        tolerance = LEAKAGE_GAP_TOLERANCE
        # the leak quantization can land the DP slightly above the true
        # optimum, so the gap check is two-sided
        gap = (solver_data - oracle) / max(abs(solver_data), 1e-12)
        ok = abs(gap) <= tolerance
    else:
        oracle = dp_throughput(solved.harvested, solved.minimum, solved.rate, grid)
        tolerance = P2P_GAP_TOLERANCE
        excess = 0.0
        for k in range(DOMINANCE_SWEEPS):
            sched = random_feasible_schedule(
                solved.harvested, solved.minimum, seed=seed + k
            )
            excess = max(excess, throughput(sched, solved.rate) - solver_data)
        result["dominance"] = {"schedules": DOMINANCE_SWEEPS, "max_excess": excess}
        # this DP is a lower bound: it may only undershoot, and at most by the
        # quantization tolerance
        gap = (solver_data - oracle) / max(abs(solver_data), 1e-12)
        ok = excess <= tiny and -1e-9 <= gap <= tolerance
    result.update(
        {
            "oracle_data": oracle,
            "relative_gap": gap,
            "tolerance": tolerance,
            "ok": bool(ok),
        }
    )
    return result


def _parse_grid(arg: str) -> tuple[int, int]:
    try:
        t, _, l = arg.lower().partition("x")
        return int(t), int(l)
    except ValueError:
        raise ValueError(f'--grid must look like "400x400", got {arg!r}') from None


# --------------------------------------------------------------------------
# emission


def _write_json(report: dict, path: Path) -> None:
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def _write_csv(solved: _Solved, path: Path) -> None:
    lines = []
    if "user1_schedule" in solved.report:
        lines.append("t_start,t_end,power,power_user1,power_user2")
        u1 = solved.report["user1_schedule"]["segments"]
        u2 = solved.report["user2_schedule"]["segments"]
        for seg, s1, s2 in zip(solved.report["schedule"]["segments"], u1, u2):
            lines.append(
                f"{seg['t_start']:.12g},{seg['t_end']:.12g},{seg['power']:.12g},"
                f"{s1['power']:.12g},{s2['power']:.12g}"
            )
    else:
        lines.append("t_start,t_end,power")
        for seg in solved.report["schedule"]["segments"]:
            lines.append(
                f"{seg['t_start']:.12g},{seg['t_end']:.12g},{seg['power']:.12g}"
            )
    path.write_text("\n".join(lines) + "\n")


def _svg_path(curve: PiecewiseCurve, to_xy) -> str:
    pts = []
    for t, vl, vr in curve.breakpoints:
        pts.append(to_xy(t, vl))
        if vr != vl:
            pts.append(to_xy(t, vr))
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)


def _write_svg(solved: _Solved, path: Path) -> None:
    width, height, margin = 720, 440, 50
    curves = solved.curves
    horizon = max(c.horizon for c in curves.values())
    vmax = max(
        max(max(vl, vr) for _, vl, vr in c.breakpoints) for c in curves.values()
    )
    vmax = max(vmax, 1e-9)

    def to_xy(t: float, v: float) -> tuple[float, float]:
        x = margin + (t / horizon) * (width - 2 * margin)
        y = height - margin - (v / vmax) * (height - 2 * margin)
        return x, y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        "<style>"
        "polyline{fill:none;stroke-width:1.5}"
        ".curve-harvested{stroke:#1f77b4}"
        ".curve-minimum{stroke:#d62728}"
        ".curve-spent{stroke:#2ca02c;stroke-width:2}"
        ".curve-usable{stroke:#9467bd}"
        ".curve-leaked{stroke:#8c564b}"
        ".contact{fill:#ff7f0e}"
        ".departure{fill:none;stroke:#000;stroke-width:1.5}"
        ".axis{stroke:#333;stroke-width:1}"
        "text{font:12px sans-serif;fill:#333}"
        "</style>",
        f'<line class="axis" x1="{margin}" y1="{height - margin}" '
        f'x2="{width - margin}" y2="{height - margin}"/>',
        f'<line class="axis" x1="{margin}" y1="{margin}" '
        f'x2="{margin}" y2="{height - margin}"/>',
        f'<text x="{width - margin}" y="{height - margin + 30}" '
        f'text-anchor="end">t = {horizon:g}</text>',
        f'<text x="{margin - 40}" y="{margin}">{vmax:.4g}</text>',
    ]
    for name, curve in curves.items():
        parts.append(
            f'<polyline class="curve-{name}" points="{_svg_path(curve, to_xy)}"/>'
        )
    for c in solved.contacts:
        if c.kind in ("upper", "lower"):
            x, y = to_xy(c.time, c.value)
            parts.append(f'<circle class="contact" cx="{x:.2f}" cy="{y:.2f}" r="2"/>')
    if solved.departure is not None:
        v = curves["harvested"].eval_left(solved.departure)
        x, y = to_xy(solved.departure, v)
        parts.append(
            f'<circle class="departure" cx="{x:.2f}" cy="{y:.2f}" r="6"/>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


_EMITTERS = {
    "json": ("report.json", lambda solved, p: _write_json(solved.report, p)),
    "csv": ("schedule.csv", _write_csv),
    "svg": ("plot.svg", _write_svg),
}


def _emit(solved: _Solved, stem: str, out_dir: Path, formats: list[str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        suffix, writer = _EMITTERS[fmt]
        target = out_dir / f"{stem}.{suffix}"
        writer(solved, target)
        written.append(target)
    return written


# --------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad arguments; we reserve 2 for
    infeasible instances, so downgrade argument errors to status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_scenario(tokens: list[str]) -> tuple[dict, str]:
    """Resolve a scenario argument: a JSON file path, a demo name, or the
    pair ``demo <name>``."""
    if tokens and tokens[0] == "demo":
        if len(tokens) != 2:
            raise ValueError("expected: demo <name>")
        tokens = tokens[1:]
    if len(tokens) != 1:
        raise ValueError("expected exactly one scenario file or demo name")
    token = tokens[0]
    path = Path(token)
    if path.is_file():
        return json.loads(path.read_text()), path.stem
    if token in DEMO_SCENARIOS:
        return DEMO_SCENARIOS[token], token
    raise ValueError(
        f"{token!r} is neither a scenario file nor a demo name "
        f"(demos: {', '.join(sorted(DEMO_SCENARIOS))})"
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument(
        "--format",
        default="json,csv,svg",
        help="comma-separated outputs: json,csv,svg (default: all)",
    )
    parser.add_argument(
        "--resolution",
        type=int,
        default=1024,
        help="grid cells for sampled harvest curves (default: 1024)",
    )
    parser.add_argument(
        "--seed", type=int, default=0, help="seed for randomized verification"
    )


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(
        prog="ehsched",
        description="Throughput-optimal energy-harvesting transmit schedules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a scenario file (or demo name)")
    p_solve.add_argument("scenario", nargs="+")
    _add_common(p_solve)

    p_verify = sub.add_parser(
        "verify", help="solve and compare against the brute-force oracle"
    )
    p_verify.add_argument("scenario", nargs="+")
    p_verify.add_argument(
        "--grid", default="400x400", help='oracle grid "TIMExLEVELS" (default 400x400)'
    )
    _add_common(p_verify)

    p_demo = sub.add_parser("demo", help="run a built-in example scenario")
    p_demo.add_argument("name", choices=sorted(DEMO_SCENARIOS))
    _add_common(p_demo)

    args = parser.parse_args(argv)
    try:
        if args.command == "demo":
            scenario, stem = DEMO_SCENARIOS[args.name], args.name
        else:
            scenario, stem = _load_scenario(args.scenario)
        formats = [f.strip() for f in args.format.split(",") if f.strip()]
        for fmt in formats:
            if fmt not in _EMITTERS:
                raise ValueError(
                    f"unknown format {fmt!r} (choose from json, csv, svg)"
                )
        solved = _solve_scenario(scenario, args.resolution)
        verification = None
        if args.command == "verify":
            verification = _verify(solved, args.grid, args.seed)
            solved.report["verification"] = verification
        written = _emit(solved, stem, Path(args.out), formats)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except GridInfeasibleError as exc:
        print(f"oracle grid too coarse: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    energy = solved.report["energy"]
    print(f"mode: {solved.report['mode']}")
    print(f"total data: {solved.report['total_data']:.9g} bits")
    print(
        "energy: harvested {harvested:.9g}, transmitted {transmitted:.9g}, "
        "leaked {leaked:.9g}, residual {residual:.9g}".format(**energy)
    )
    if verification is not None:
        print(
            "oracle: {oracle_data:.9g} bits, relative gap {relative_gap:.3%} "
            "(tolerance {tolerance:.1%}) -> {status}".format(
                status="ok" if verification["ok"] else "FAILED", **verification
            )
        )
    for target in written:
        print(f"wrote {target}")
    return 0 if verification is None or verification["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
