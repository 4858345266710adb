"""Per-axis calibration of the optical mouse sensors.

A raw optical velocity ``v`` is corrected with ``v / (b + a * v)``. The
sensor's distortion is the exact inverse of that map, which makes the
measured-to-true ratio a straight line in the measured speed,
``ratio = b + a * v_measured``; calibration therefore reduces to a line fit.
"""

import csv
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, column_or_1d

from ..exceptions import SimulationFault

_DENOM_EPS = 1e-9


@dataclass(frozen=True, slots=True)
class OpticalAxisCalibration:
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")


IDENTITY = OpticalAxisCalibration()


def apply_calibration(raw, cal):
    """Map a raw optical velocity to a calibrated one (scalar or array)."""
    denom = cal.b + cal.a * np.asarray(raw, dtype=float)
    if np.any(np.abs(denom) < _DENOM_EPS):
        raise SimulationFault("calibration denominator b + a*raw is zero")
    out = raw / denom
    return float(out) if np.ndim(out) == 0 else out


def inverse_distortion(v, cal):
    """Raw reading a sensor with parameters ``cal`` reports for true speed ``v``."""
    denom = 1.0 - cal.a * np.asarray(v, dtype=float)
    if np.any(np.abs(denom) < _DENOM_EPS):
        raise SimulationFault("distortion denominator 1 - a*v is zero")
    out = cal.b * v / denom
    return float(out) if np.ndim(out) == 0 else out


def identity_calibration():
    """Per-sensor ``(x, y)`` calibration pairs that leave readings untouched."""
    return ((IDENTITY, IDENTITY),) * 3


def fit_axis_calibration(samples):
    """Fit ``(a, b)`` from ``(true_speed, measured_speed)`` pairs.

    The pairs are average speeds over calibration strokes of known length.
    The ratio measured/true is regressed on the measured speed with ordinary
    least squares.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ValueError("need at least two (true, measured) samples")
    reg = AxisCalibrationRegressor().fit(arr[:, 1], arr[:, 0])
    return reg.calibration_


class AxisCalibrationRegressor(TransformerMixin, BaseEstimator):
    """Estimate an :class:`OpticalAxisCalibration` from calibration strokes.

    ``fit(X, y)`` takes measured average speeds ``X`` and true average speeds
    ``y``; ``transform`` applies the fitted correction to raw readings.
    """

    def fit(self, X, y):
        v_m = column_or_1d(np.asarray(X, dtype=float))
        v_true = column_or_1d(np.asarray(y, dtype=float))
        if v_m.shape != v_true.shape or v_m.size < 2:
            raise ValueError("need at least two paired samples")
        if np.any(v_true == 0):
            raise ValueError("true speeds must be non-zero")
        if np.ptp(v_m) == 0:
            raise ValueError("degenerate calibration: all measured speeds are equal")
        ratio = v_m / v_true
        slope, intercept = np.polyfit(v_m, ratio, 1)
        self.a_ = float(slope)
        self.b_ = float(intercept)
        self.calibration_ = OpticalAxisCalibration(self.a_, self.b_)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "calibration_")
        return apply_calibration(np.asarray(X, dtype=float), self.calibration_)

    def predict(self, X):
        return self.transform(X)


def write_calibration_report(samples, cal, path):
    """CSV with one row per stroke: measured speed, ratio and fitted ratio."""
    arr = np.asarray(samples, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["speed", "ratio", "fit"])
        for v_true, v_m in arr:
            w.writerow([repr(float(v_m)), repr(float(v_m / v_true)), repr(float(cal.b + cal.a * v_m))])
