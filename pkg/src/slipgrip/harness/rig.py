"""Simulated bench tests of the planar velocity sensor.

The sensor head is moved over a surface by a rig: a 100 mm line, a half
turn, a line during which one optical sensor leaves the surface halfway, and
a line combined with a half turn. Each seeded run first calibrates every
sensor axis from quantized strokes of known length, then integrates the fused
velocity and compares it with the rig motion.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..sensors.calibration import fit_axis_calibration, inverse_distortion
from ..sensors.optical import (
    DEFAULT_CPI,
    SensorLayout,
    calibrate_reading,
    fuse,
    quantum,
    simulate_optical_reading,
)
from ..sim.contact import PlanarVelocity
from ..slip.trajectory import TrajectorySpec, trapezoid
from .presets import SURFACE_PRESETS

RIG_KINDS = ("linear", "rotation", "rejection", "combined")
#: Sensor that leaves the surface in the rejection test and where it does.
REJECTED_SENSOR = 2
REJECTION_AT = 0.05


@dataclass(frozen=True)
class RigMotion:
    distance: float = 0.1
    angle: float = 0.0
    duration: float = 2.0


MOTIONS = {
    "linear": RigMotion(0.1, 0.0),
    "rotation": RigMotion(0.0, -math.pi),
    "rejection": RigMotion(0.1, 0.0),
    "combined": RigMotion(0.1, -math.pi),
}


def calibration_strokes(cal, rng, cpi=DEFAULT_CPI, stroke=0.1,
                        speeds=(0.02, 0.04, 0.06, 0.08, 0.1, 0.12)):
    """``(true, measured)`` average speeds of strokes along one sensor axis."""
    q = quantum(cpi)
    samples = []
    for v in speeds:
        T = stroke / v
        raw = inverse_distortion(v, cal)
        counts = math.floor((raw * T + rng.uniform(0.0, q)) / q)
        samples.append((v, counts * q / T))
    return samples


def fit_sensor_calibration(distortion, rng, cpi=DEFAULT_CPI):
    """Per-sensor, per-axis calibration fitted from strokes on the surface."""
    return tuple(tuple(fit_axis_calibration(calibration_strokes(distortion[j][k], rng, cpi))
                       for k in range(2)) for j in range(3))


def _pose(motion, t):
    lin, _ = trapezoid(TrajectorySpec(motion.distance or 1.0, motion.duration), t)
    rot, _ = trapezoid(TrajectorySpec(motion.angle or 1.0, motion.duration), t)
    return (lin if motion.distance else 0.0), (rot if motion.angle else 0.0)


def run_rig(kind="linear", surface="ideal", seed=0, cpi=DEFAULT_CPI, quantize=True,
            calibrate=True, window=84 / 10000, d=0.01):
    """One rig run; returns the final errors ``(dx, dy, dtheta)`` in m and rad.

    The motion is along the world x axis, which coincides with the sensor x
    axis at the start.
    """
    if kind not in RIG_KINDS:
        raise ValueError(f"unknown rig test {kind!r}; choose from {RIG_KINDS}")
    rng = np.random.default_rng(seed)
    distortion = SURFACE_PRESETS[surface]
    cal = fit_sensor_calibration(distortion, rng, cpi) if calibrate else distortion
    layout = SensorLayout(d)
    motion = MOTIONS[kind]
    n = int(math.ceil(motion.duration / window)) + 1
    x = y = th = 0.0
    prev = _pose(motion, 0.0)
    residual = None
    for k in range(1, n + 1):
        t = k * window
        cur = _pose(motion, t)
        dl, dth = cur[0] - prev[0], cur[1] - prev[1]
        # World-frame window velocity expressed in the sensor frame at mid-window.
        phi = prev[1] + 0.5 * dth
        vx_w, om = dl / window, dth / window
        v_s = PlanarVelocity(math.cos(phi) * vx_w, -math.sin(phi) * vx_w, om)
        dropout = [False, False, False]
        if kind == "rejection" and cur[0] >= REJECTION_AT:
            dropout[REJECTED_SENSOR] = True
        raw = simulate_optical_reading(v_s, layout, distortion, cpi, window, dropout, rng,
                                       residual=residual, quantize=quantize)
        residual = raw.residual
        v = fuse(calibrate_reading(raw, cal), layout).velocity
        phi_est = th + 0.5 * v.omega * window
        c, s = math.cos(phi_est), math.sin(phi_est)
        x += (c * v.vx - s * v.vy) * window
        y += (s * v.vx + c * v.vy) * window
        th += v.omega * window
        prev = cur
    return x - motion.distance, y, th - motion.angle


def rig_test(kind="linear", surface="ideal", seeds=range(10), **kw):
    """Error statistics over seeded runs, in mm and degrees."""
    errs = np.array([run_rig(kind, surface, s, **kw) for s in seeds])
    motion = MOTIONS[kind]
    ex, ey, et = errs[:, 0] * 1e3, errs[:, 1] * 1e3, np.degrees(errs[:, 2])
    dist = np.hypot(errs[:, 0] + motion.distance, errs[:, 1]) - motion.distance
    report = {
        "kind": kind, "surface": surface, "runs": len(errs),
        "x_mm": {"mean": float(ex.mean()), "std": float(ex.std())},
        "y_mm": {"mean": float(ey.mean()), "std": float(ey.std())},
        "theta_deg": {"mean": float(et.mean()), "std": float(et.std())},
        "distance_mm": {"mean": float(dist.mean() * 1e3), "std": float(dist.std() * 1e3)},
        "max_abs_distance_error_mm": float(np.max(np.abs(dist)) * 1e3),
        "max_abs_theta_error_deg": float(np.max(np.abs(et))),
    }
    if motion.distance:
        report["max_distance_error_pct"] = 100.0 * report["max_abs_distance_error_mm"] / (
            motion.distance * 1e3)
    if motion.angle:
        report["max_theta_error_pct"] = 100.0 * report["max_abs_theta_error_deg"] / abs(
            math.degrees(motion.angle))
    return report
