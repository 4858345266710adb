"""Triple optical-mouse planar velocity sensor: forward model and fusion.

Three sensors sit 120 degrees apart. Sensor ``j`` reports the surface
velocity at its measurement point, rotated into its own frame::

    v_j = R(angle_j) @ (vx, vy) + (d * omega, 0)

Stacking the three gives ``v_o = A @ v`` with ``A`` of shape (6, 3). The planar
velocity is recovered by least squares, with a one-sensor outlier rejection
that exploits the zero-reading failure mode of a sensor that lost tracking.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array

from ..sim.contact import PlanarVelocity
from .calibration import apply_calibration, inverse_distortion

SENSOR_ANGLES_DEG = (-30.0, -150.0, 90.0)
RESIDUAL_THRESHOLD = 0.2
RESIDUAL_REGULARIZER = 1e-3
DEFAULT_CPI = 3200.0


@dataclass(frozen=True)
class SensorLayout:
    d: float = 0.01
    angles: tuple = SENSOR_ANGLES_DEG

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("lever arm d must be positive")
        if tuple(self.angles) != SENSOR_ANGLES_DEG:
            raise ValueError(f"sensor angles are fixed to {SENSOR_ANGLES_DEG}")


def _rot(deg):
    a = math.radians(deg)
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def build_A(layout):
    return _build_A_cached(layout.d).copy()


@lru_cache(maxsize=32)
def _build_A_cached(d):
    blocks = [np.hstack([_rot(a), np.array([[d], [0.0]])]) for a in SENSOR_ANGLES_DEG]
    return np.vstack(blocks)


@lru_cache(maxsize=32)
def _pinvs(d):
    A = _build_A_cached(d)
    full = np.linalg.pinv(A)
    reduced = {}
    for j in range(3):
        keep = [i for i in range(6) if i // 2 != j]
        reduced[j] = (keep, np.linalg.pinv(A[keep]))
    return full, reduced


def quantum(cpi=DEFAULT_CPI):
    """Displacement resolution in metres (one count)."""
    return 0.0254 / cpi


@dataclass
class RawOpticalReading:
    """Window-averaged per-sensor velocities, shape (3, 2), in m/s.

    ``residual`` holds the sub-count displacement each axis carries into the
    next window, as a real sensor's counter does.
    """

    velocities: np.ndarray
    tracking: np.ndarray = field(default_factory=lambda: np.ones(3, dtype=bool))
    residual: np.ndarray = None


def simulate_optical_reading(true_v, layout, cal, cpi, window_dt, dropout, rng,
                             residual=None, attenuation=0.0, quantize=True):
    """Simulate one reporting window of the three optical sensors.

    ``true_v`` is the window-average relative velocity at the sensor centre.
    ``cal`` gives each sensor's ``(x, y)`` distortion parameters; the raw
    reading is their inverse-calibration map of the ideal velocity. Sensors
    flagged in ``dropout`` report ``attenuation`` times their reading.
    """
    if not window_dt > 0:
        raise ValueError("window_dt must be positive")
    A = _build_A_cached(layout.d)
    ideal = (A @ np.array([true_v.vx, true_v.vy, true_v.omega])).reshape(3, 2)
    raw = np.empty((3, 2))
    for j in range(3):
        for k in range(2):
            raw[j, k] = inverse_distortion(ideal[j, k], cal[j][k])
    if quantize:
        q = quantum(cpi)
        if residual is None:
            residual = rng.uniform(0.0, q, size=(3, 2))
        disp = raw * window_dt + residual
        counts = np.floor(disp / q)
        residual = disp - counts * q
        raw = counts * q / window_dt
    dropout = np.asarray(dropout, dtype=bool)
    raw[dropout] *= attenuation
    return RawOpticalReading(raw, ~dropout, residual)


def calibrate_reading(reading, cal):
    """Apply each sensor's per-axis calibration to a raw reading."""
    out = np.empty((3, 2))
    for j in range(3):
        for k in range(2):
            out[j, k] = apply_calibration(reading.velocities[j, k], cal[j][k])
    return out


@dataclass(frozen=True)
class FusionResult:
    velocity: PlanarVelocity
    rejected: int = None
    residual_ratio: float = 0.0
    degraded: bool = False


def fuse(readings, layout, present=None):
    """Least-squares planar velocity from calibrated per-sensor readings.

    ``readings`` has shape (3, 2). ``present`` optionally marks sensors that
    are physically available; with fewer than two the result is flagged
    ``degraded`` and the velocity is zero, leaving the hold policy to the caller.
    """
    v_o = np.asarray(readings, dtype=float).reshape(6)
    full, reduced = _pinvs(layout.d)
    A = _build_A_cached(layout.d)
    if present is not None:
        present = np.asarray(present, dtype=bool)
        if present.sum() < 2:
            return FusionResult(PlanarVelocity(), None, 0.0, True)
        if present.sum() == 2:
            j = int(np.flatnonzero(~present)[0])
            keep, pinv = reduced[j]
            v = pinv @ v_o[keep]
            return FusionResult(PlanarVelocity(*map(float, v)), j, 0.0, False)

    v = full @ v_o
    eps = float(np.linalg.norm(v_o - A @ v))
    ratio = eps / (float(np.linalg.norm(v_o)) + RESIDUAL_REGULARIZER)
    if ratio > RESIDUAL_THRESHOLD:
        speeds = np.linalg.norm(v_o.reshape(3, 2), axis=1)
        j = int(np.argmin(speeds))
        keep, pinv = reduced[j]
        v = pinv @ v_o[keep]
        return FusionResult(PlanarVelocity(*map(float, v)), j, ratio, False)
    return FusionResult(PlanarVelocity(*map(float, v)), None, ratio, False)


class VelocityFusion(TransformerMixin, BaseEstimator):
    """Batch fusion of stacked sensor readings, shape (n, 6) -> (n, 3).

    Rows are ``(v1x, v1y, v2x, v2y, v3x, v3y)`` after calibration.
    """

    def __init__(self, d=0.01):
        self.d = d

    def fit(self, X=None, y=None):
        self.layout_ = SensorLayout(self.d)
        self.n_features_in_ = 6
        return self

    def transform(self, X):
        layout = getattr(self, "layout_", None) or SensorLayout(self.d)
        X = check_array(X, dtype=float)
        if X.shape[1] != 6:
            raise ValueError(f"expected 6 columns, got {X.shape[1]}")
        out = np.empty((X.shape[0], 3))
        self.rejected_ = np.full(X.shape[0], -1)
        for i, row in enumerate(X):
            res = fuse(row.reshape(3, 2), layout)
            out[i] = (res.velocity.vx, res.velocity.vy, res.velocity.omega)
            if res.rejected is not None:
                self.rejected_[i] = res.rejected
        return out
