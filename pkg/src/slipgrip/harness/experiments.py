"""Scripted experiments: step and frequency response, slip tests and the demo.

Every experiment builds a :class:`Scenario`, runs it and returns the trace
together with a JSON-serialisable report.
"""

import math
from collections import Counter

import numpy as np

from ..estimation.exploration import exploration_scenario
from .metrics import BODE_FREQS, bode_analysis, step_metrics
from .presets import OBJECT_PRESETS, SLIP_OBJECTS
from .runner import run_scenario
from .scenario import ArmMove, Command, Disturbance, Scenario, Support
from .trace import MODE_CODES, Trace

#: Gravity used for the scripted weights.
G = 9.81
LIGHT_WEIGHT = 0.141
HEAVY_WEIGHT = 0.727


def _events(trace):
    return dict(Counter(e["kind"] for e in trace.events))


# -- inner loop -------------------------------------------------------------

def step_test(obj="wood", seed=0, f_from=5.0, f_to=25.0, t_step=0.1, duration=0.6, **changes):
    """Grasp-force step from ``f_from`` to ``f_to`` at ``t_step``."""
    sc = Scenario(name=f"step-{obj}", object=obj, seed=seed, duration=duration,
                  initial_force=f_from,
                  commands=(Command(0.0, "force", f_d=f_from), Command(t_step, "force", f_d=f_to)),
                  **changes)
    trace = run_scenario(sc)
    m = step_metrics(trace, f_from, f_to, t_step)
    t = trace["t"]
    tail = np.abs(trace["f_n"][t >= t_step + m.t_s] - f_to) if m.t_s is not None else np.array([np.inf])
    report = {"object": obj, "seed": seed, "f_from": f_from, "f_to": f_to, **m.as_dict(),
              "final_error": float(abs(trace["f_n"][-1] - f_to)),
              "max_error_after_settling": float(tail.max()) if tail.size else 0.0}
    return trace, report


def bode_schedule(freqs=BODE_FREQS, periods=4.0, min_duration=0.25, start=0.2):
    """Consecutive sine segments ``{freq: (t_start, t_end)}`` after a settle time."""
    t = start
    segments = {}
    for f in freqs:
        d = max(periods / f, min_duration)
        segments[float(f)] = (t, t + d)
        t += d
    return segments


class FirstOrderDelayPlant:
    """Analytic steady-state response of ``exp(-s*delay) / (1 + s*T)``.

    Stands in for the simulator in :func:`bode_test` to check the harness
    against a known transfer function.
    """

    def __init__(self, T=0.0, delay=0.002):
        self.T = T
        self.delay = delay

    def phase(self, freq):
        w = 2.0 * math.pi * freq
        return -math.degrees(w * self.delay + math.atan(w * self.T))

    def magnitude(self, freq):
        w = 2.0 * math.pi * freq
        return -20.0 * math.log10(math.sqrt(1.0 + (w * self.T) ** 2))

    def respond(self, t, segments, offset, amplitude):
        y = np.full_like(t, offset)
        for f, (t0, t1) in segments.items():
            w = 2.0 * math.pi * f
            m = (t >= t0) & (t < t1)
            gain = 1.0 / math.sqrt(1.0 + (w * self.T) ** 2)
            lag = w * self.delay + math.atan(w * self.T)
            y[m] = offset + amplitude * gain * np.sin(w * (t[m] - t0) - lag)
        return y


def bode_test(obj="wood", seed=0, freqs=BODE_FREQS, offset=15.0, amplitude=5.0, plant=None,
              **changes):
    """Sinusoidal force commands at each frequency, then a Bode fit.

    With ``plant`` (e.g. :class:`FirstOrderDelayPlant`) the simulator is
    replaced by the plant's analytic response to the same command schedule.
    """
    segments = bode_schedule(freqs)
    end = max(t1 for _, t1 in segments.values())
    if plant is None:
        cmds = [Command(0.0, "force", f_d=offset)]
        cmds += [Command(t0, "force", f_d=offset, profile="sine", amplitude=amplitude, freq=f)
                 for f, (t0, _) in segments.items()]
        sc = Scenario(name=f"bode-{obj}", object=obj, seed=seed, duration=end,
                      initial_force=offset, commands=tuple(cmds), **changes)
        trace = run_scenario(sc)
    else:
        n = int(round(end * 10000))
        t = np.arange(n + 1) / 10000.0
        f_d = np.full_like(t, offset)
        for f, (t0, t1) in segments.items():
            m = (t >= t0) & (t < t1)
            f_d[m] = offset + amplitude * np.sin(2.0 * math.pi * f * (t[m] - t0))
        trace = Trace.from_columns(t=t, f_d=f_d, f_n=plant.respond(t, segments, offset, amplitude))
        trace.metadata["plant"] = type(plant).__name__
    trace.metadata["segments"] = {str(f): list(v) for f, v in segments.items()}
    points = bode_analysis(trace, freqs, segments)
    report = {"object": obj if plant is None else None, "seed": seed,
              "points": [{"freq": p.freq, "magnitude_db": p.magnitude, "phase_deg": p.phase}
                         for p in points]}
    return trace, report


# -- exploration --------------------------------------------------------------

def explore_test(obj="plastic", seed=0, **changes):
    sc = exploration_scenario(Scenario(object=obj, seed=seed), **changes)
    trace, world = run_scenario(sc, return_world=True)
    truth = sc.true_contacts
    fingers = []
    for i, est in enumerate(getattr(world, "explore_result", (None, None))):
        row = {"finger": i, "true_mu_c": truth[i].mu_c, "true_mu_s": truth[i].mu_s,
               "true_mu_v": truth[i].mu_v, "true_r": truth[i].r}
        if est is not None:
            row.update(mu_c=est.mu_c, mu_s=est.mu_s, mu_v=est.mu_v, r=est.r,
                       r_reliable=est.r_reliable)
        fingers.append(row)
    return trace, {"object": obj, "seed": seed, "duration": sc.exploration.duration,
                   "fingers": fingers, "events": _events(trace)}


# -- slip tests -------------------------------------------------------------

def _command_window(trace, t_cmd, mode):
    """Start and end time of a trajectory-mode episode."""
    code = MODE_CODES.index(mode)
    t = trace["t"]
    active = (trace["mode"] == code) & (t >= t_cmd)
    idx = np.flatnonzero(active)
    if idx.size == 0:
        return t_cmd, t_cmd
    return float(t[idx[0]]), float(t[idx[-1]])


def linear_slip_test(obj="plastic", seed=0, target=0.02, duration=5.0, t_cmd=0.5,
                     initial_force=8.0, settle=1.5, **changes):
    sc = Scenario(name=f"linear-{obj}", object=obj, seed=seed,
                  duration=t_cmd + duration + settle, initial_force=initial_force,
                  commands=(Command(0.0, "avoidance"),
                            Command(t_cmd, "linear", target=target, duration=duration)),
                  **changes)
    trace = run_scenario(sc)
    t = trace["t"]
    i0 = int(np.searchsorted(t, t_cmd))
    start, end = _command_window(trace, t_cmd, "linear")
    sticks = [e for e in trace.events_of("stick") if start <= e["t"] <= end]
    final = float(trace["px"][-1] - trace["px"][i0])
    report = {
        "object": obj, "seed": seed, "target": target, "duration": duration,
        "final_displacement": final, "error": final - target,
        "estimated_displacement": float(trace["p_est"][t <= end][-1]) if end > start else 0.0,
        "tracking_time": end - start,
        "stick_events": len(sticks),
        "stick_rate": len(sticks) / (end - start) if end > start else 0.0,
        "max_f_d": float(trace["f_d"].max()),
        "events": _events(trace),
    }
    return trace, report


def rotational_slip_test(obj="plastic", seed=0, target=math.radians(45.0), duration=5.0,
                         start_angle=math.radians(165.0), t_cmd=0.5, initial_force=15.0,
                         settle=1.5, **changes):
    """Gravity-driven rotation starting ``180 deg - start_angle`` off upright."""
    sc = Scenario(name=f"rotational-{obj}", object=obj, seed=seed,
                  duration=t_cmd + duration + settle, initial_force=initial_force,
                  cog_angle=start_angle,
                  commands=(Command(0.0, "avoidance"),
                            Command(t_cmd, "rotational", target=target, duration=duration)),
                  **changes)
    trace = run_scenario(sc)
    i0 = int(np.searchsorted(trace["t"], t_cmd))
    rotated = abs(float(trace["theta"][-1] - trace["theta"][i0]))
    start, end = _command_window(trace, t_cmd, "rotational")
    est = abs(float(trace["theta_est"][trace["t"] <= end][-1])) if end > start else 0.0
    report = {
        "object": obj, "seed": seed, "target_deg": math.degrees(target), "duration": duration,
        "rotation_deg": math.degrees(rotated), "error_deg": math.degrees(rotated - target),
        "estimated_rotation_deg": math.degrees(est),
        "linear_slip": float(trace["px"][-1] - trace["px"][i0]),
        "max_f_d": float(trace["f_d"].max()),
        "events": _events(trace),
    }
    return trace, report


def hinge_test(obj="plastic", seed=0, start_angle=math.radians(30.0), sweep=math.radians(-60.0),
               sweep_time=3.0, t_cmd=0.5, t_move=1.0, initial_force=8.0, settle=1.0, **changes):
    """Rotate the gripper by ``sweep`` while the object hangs in hinge mode."""
    sc = Scenario(name=f"hinge-{obj}", object=obj, seed=seed,
                  duration=t_move + sweep_time + settle, initial_force=initial_force,
                  gripper_angle=start_angle, cog_angle=-start_angle,
                  commands=(Command(0.0, "avoidance"), Command(t_cmd, "hinge")),
                  arm=(ArmMove(t_move, "rotate", sweep, sweep_time),), **changes)
    trace = run_scenario(sc)
    world = trace["psi"] + trace["theta"]
    change = world - world[0]
    report = {
        "object": obj, "seed": seed, "sweep_deg": math.degrees(sweep),
        "orientation_change_deg": math.degrees(abs(float(change[-1]))),
        "max_orientation_change_deg": math.degrees(float(np.max(np.abs(change)))),
        "linear_slip": float(trace["px"][-1]),
        "events": _events(trace),
    }
    return trace, report


def avoidance_schedule(obj="plastic"):
    """Weights on top, on the side, a heavier weight, removal and an impact.

    Returns ``(disturbances, increases, removals)`` where the last two list
    the onset times of load increases and decreases.
    """
    w = OBJECT_PRESETS[obj].dims[1]
    light, heavy = LIGHT_WEIGHT * G, HEAVY_WEIGHT * G
    dist = (
        Disturbance(1.0, 1.0, fx=light, mass=LIGHT_WEIGHT),
        Disturbance(2.5, 1.0, fx=light, tau=light * w / 2.0, mass=LIGHT_WEIGHT),
        Disturbance(4.0, 1.5, fx=heavy, mass=HEAVY_WEIGHT),
        # A 141 g weight dropped from about 5 cm lands within 10 ms and stays.
        Disturbance(6.5, 0.01, fx=14.0, shape="impulse", mass=LIGHT_WEIGHT),
        Disturbance(6.5, math.inf, fx=light, mass=LIGHT_WEIGHT),
    )
    increases = (1.0, 2.5, 4.0, 6.5)
    removals = (2.0, 3.5, 5.5)
    return dist, increases, removals


def avoidance_test(obj="plastic", seed=0, initial_force=8.0, duration=8.0, **changes):
    dist, increases, removals = avoidance_schedule(obj)
    sc = Scenario(name=f"avoidance-{obj}", object=obj, seed=seed, duration=duration,
                  initial_force=initial_force, commands=(Command(0.0, "avoidance"),),
                  disturbances=dist, **changes)
    trace = run_scenario(sc)
    t_h = sc.rates.outer_divisor / sc.rates.physics_hz
    ticks = outer_ticks(trace, sc.rates.outer_divisor)
    rises = [first_rise(trace, ticks, t0, t_h) for t0 in increases]
    decay = decay_residuals(trace, ticks, sc.outer_gains.alpha_s)
    slip = float(np.max(np.hypot(trace["px"], trace["py"])))
    report = {
        "object": obj, "seed": seed,
        "rise_ticks": rises,
        "max_slip": slip,
        "decay_steps": decay["steps"],
        "decay_max_residual": decay["max_residual"],
        "max_f_d": float(trace["f_d"].max()),
        "events": _events(trace),
    }
    return trace, report


def outer_ticks(trace, outer_divisor):
    """Row indices of outer-loop updates (assumes no decimation)."""
    dec = int(trace.metadata.get("decimation", 1))
    if dec != 1:
        raise ValueError("outer tick analysis needs an undecimated trace")
    return np.arange(outer_divisor, len(trace), outer_divisor)


def first_rise(trace, ticks, t0, t_h):
    """Outer ticks after ``t0`` until ``f_d`` first increases (None if never)."""
    t = trace["t"]
    f_d = trace["f_d"]
    after = ticks[t[ticks] > t0 + 1e-12]
    if after.size == 0:
        return None
    prev = f_d[after[0] - 1]
    for n, k in enumerate(after, start=1):
        if f_d[k] > prev:
            return n
        if t[k] > t0 + 0.5:
            break
    return None


def decay_residuals(trace, ticks, alpha_s):
    """Largest deviation from ``f_d = a f_d_prev + (1 - a) f_nc`` on decaying ticks."""
    f_d, f_nc, mode = trace["f_d"], trace["f_nc"], trace["mode"]
    code = MODE_CODES.index("avoidance")
    worst, steps = 0.0, 0
    for k in ticks:
        if mode[k] != code or mode[k - 1] != code:
            continue
        prev = f_d[k - 1]
        if f_nc[k] > prev:
            continue
        expected = alpha_s * prev + (1.0 - alpha_s) * f_nc[k]
        worst = max(worst, abs(f_d[k] - expected))
        steps += 1
    return {"steps": steps, "max_residual": worst}


SLIP_TESTS = {
    "linear": linear_slip_test,
    "rotational": rotational_slip_test,
    "hinge": hinge_test,
    "avoidance": avoidance_test,
}


def slip_test(kind, obj="plastic", seed=0, **kw):
    try:
        fn = SLIP_TESTS[kind]
    except KeyError:
        raise ValueError(f"unknown slip test {kind!r}; choose from {sorted(SLIP_TESTS)}") from None
    return fn(obj, seed, **kw)


# -- demonstration -----------------------------------------------------------

def demo_scenario(obj="plastic", seed=0):
    """Grasp on the table, explore, lift, slide, hinge, reorient and rotate."""
    return Scenario(
        name=f"demo-{obj}", object=obj, seed=seed, duration=18.0,
        initial_force=5.0, support=Support(enabled=True),
        commands=(
            Command(0.0, "explore"),
            Command(3.5, "linear", target=0.03, duration=3.0),
            Command(7.5, "hinge"),
            Command(10.8, "avoidance"),
            Command(13.7, "rotational", target=math.radians(30.0), duration=3.0),
        ),
        arm=(
            ArmMove(2.2, "translate", -0.05, 1.0),
            ArmMove(7.6, "rotate", math.radians(90.0), 3.0),
            ArmMove(11.0, "rotate", math.radians(-60.0), 2.0),
        ),
    )


def demo(obj="plastic", seed=0):
    sc = demo_scenario(obj, seed)
    trace = run_scenario(sc)
    ev = _events(trace)
    estimated = len(trace.events_of("estimate"))
    success = ev.get("separation", 0) == 0 and ev.get("drop", 0) == 0 and estimated == 2
    switches = [(e["t"], e["frm"], e["to"], e["reason"]) for e in trace.events_of("mode_switch")]
    report = {"object": obj, "seed": seed, "success": success, "events": ev,
              "estimates": [{k: v for k, v in e.items() if k != "kind"}
                            for e in trace.events_of("estimate")],
              "mode_switches": switches,
              "final_rotation_deg": math.degrees(float(trace["theta"][-1]))}
    return trace, report


__all__ = [
    "SLIP_OBJECTS", "FirstOrderDelayPlant", "avoidance_schedule", "avoidance_test",
    "bode_schedule", "bode_test", "decay_residuals", "demo", "demo_scenario",
    "explore_test", "first_rise", "hinge_test", "linear_slip_test", "outer_ticks",
    "rotational_slip_test", "slip_test", "step_test",
]
