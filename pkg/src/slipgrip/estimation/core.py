"""Contact-property identification from exploration logs.

Friction coefficients come from a linear slide, the rim radius from a spin of
the object in the grasp. Each finger's stream is processed on its own.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..exceptions import InsufficientDataError
from ..sim.contact import ContactParams

LOG_COLUMNS = ("t", "fx", "fy", "tau", "fn", "vx", "vy", "omega", "finger_id")
FEATURES = ("fx", "fy", "tau", "fn", "vx", "vy", "omega")

V_MIN = 2e-3
OMEGA_MAX = 0.1
OMEGA_MIN = 0.1
V_MAX = 5e-3
F_N_MIN = 1.0
#: Below this Coulomb estimate the radius regression is considered meaningless.
MU_C_RELIABLE = 0.05


@dataclass(frozen=True, slots=True)
class ExplorationConfig:
    f_g: float = 5.0
    t1: float = 0.2
    t2: float = 0.8
    d_e: float = 0.010
    theta_e: float = math.radians(10.0)
    t_theta: float = 0.5

    def __post_init__(self):
        for name in self.__slots__:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def duration(self):
        """Scripted time: settle, slide, rotate out and rotate back."""
        return self.t1 + self.t2 + 2.0 * self.t_theta

    @property
    def mean_speed(self):
        return self.d_e / self.t2


class ContactSampleLog:
    """Per-finger sensor samples at the outer-loop rate.

    Columns follow :data:`LOG_COLUMNS`; forces in N, torque in N m,
    velocities in m/s and rad/s.
    """

    def __init__(self, data=None):
        if data is None:
            data = np.empty((0, len(LOG_COLUMNS)))
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[1] != len(LOG_COLUMNS):
            raise ValueError(f"log data must have {len(LOG_COLUMNS)} columns")
        self.data = data

    @classmethod
    def from_columns(cls, **cols):
        n = len(cols["t"])
        arr = np.zeros((n, len(LOG_COLUMNS)))
        for i, name in enumerate(LOG_COLUMNS):
            if name in cols:
                arr[:, i] = cols[name]
        return cls(arr)

    def __len__(self):
        return self.data.shape[0]

    def __getattr__(self, name):
        if name in LOG_COLUMNS:
            return self.data[:, LOG_COLUMNS.index(name)]
        raise AttributeError(name)

    def for_finger(self, finger):
        return ContactSampleLog(self.data[self.finger_id == finger])

    @property
    def features(self):
        """Matrix of :data:`FEATURES` for the estimators."""
        idx = [LOG_COLUMNS.index(c) for c in FEATURES]
        return self.data[:, idx]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(LOG_COLUMNS)
            for row in self.data:
                w.writerow([repr(float(x)) for x in row[:-1]] + [int(row[-1])])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != LOG_COLUMNS:
                raise ValueError(f"{path}: expected header {','.join(LOG_COLUMNS)}")
            rows = [[float(x) for x in row] for row in reader if row]
        return cls(np.array(rows).reshape(-1, len(LOG_COLUMNS)))


def linear_regression(xs, ys):
    """Ordinary least-squares line. Returns ``(intercept, slope)``."""
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError("xs and ys differ in length")
    if x.size < 2 or np.ptp(x) == 0:
        raise ValueError("degenerate regression: need two distinct x values")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    return float(ym - slope * xm), slope


def _features(X):
    X = check_array(X, dtype=float, ensure_min_samples=0)
    if X.shape[1] != len(FEATURES):
        raise ValueError(f"expected {len(FEATURES)} feature columns {FEATURES}")
    return X


class FrictionEstimator(RegressorMixin, BaseEstimator):
    """Stribeck friction identification from a linear slide.

    Samples spinning faster than ``omega_max`` or pressed less than
    ``f_n_min`` are skipped. Slower than ``v_min`` they count as pre-slip and
    only bound the static coefficient; the rest are fitted with
    ``mu = mu_c + mu_v * v``. ``predict`` evaluates that line at speed ``X``.
    """

    def __init__(self, v_min=V_MIN, omega_max=OMEGA_MAX, f_n_min=F_N_MIN):
        self.v_min = v_min
        self.omega_max = omega_max
        self.f_n_min = f_n_min

    def fit(self, X, y=None):
        X = _features(X)
        fx, fy, _, fn, vx, vy, om = X.T
        valid = (np.abs(om) <= self.omega_max) & (fn >= self.f_n_min)
        v = np.hypot(vx, vy)
        mu = np.zeros_like(fn)
        mu[valid] = np.hypot(fx, fy)[valid] / fn[valid]
        self.static_mask_ = valid & (v < self.v_min)
        self.kinetic_mask_ = valid & (v >= self.v_min)
        if self.kinetic_mask_.sum() < 2:
            raise InsufficientDataError(
                f"insufficient slip: {int(self.kinetic_mask_.sum())} kinetic samples")
        try:
            self.mu_c_, self.mu_v_ = linear_regression(v[self.kinetic_mask_], mu[self.kinetic_mask_])
        except ValueError as exc:
            raise InsufficientDataError(f"insufficient slip: {exc}") from None
        static = mu[self.static_mask_]
        self.mu_s_ = max(float(static.max()), self.mu_c_) if static.size else self.mu_c_
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "mu_c_")
        return self.mu_c_ + self.mu_v_ * np.asarray(X, dtype=float).ravel()


class ContactRadiusEstimator(RegressorMixin, BaseEstimator):
    """Rim-radius identification from an in-grasp spin.

    Regresses ``mu_tau = |tau| / f_n`` on ``|omega|`` over samples that spin
    at least ``omega_min``, press at least ``f_n_min`` and translate no faster
    than ``v_max``; the radius is the intercept divided by ``mu_c``.
    """

    def __init__(self, mu_c=0.4, omega_min=OMEGA_MIN, v_max=V_MAX, f_n_min=F_N_MIN):
        self.mu_c = mu_c
        self.omega_min = omega_min
        self.v_max = v_max
        self.f_n_min = f_n_min

    def fit(self, X, y=None):
        if not self.mu_c > 0:
            raise ValueError("mu_c must be positive")
        X = _features(X)
        _, _, tau, fn, vx, vy, om = X.T
        self.used_mask_ = ((np.abs(om) >= self.omega_min) & (fn >= self.f_n_min)
                           & (np.hypot(vx, vy) <= self.v_max))
        if self.used_mask_.sum() < 2:
            raise InsufficientDataError(
                f"insufficient rotation: {int(self.used_mask_.sum())} usable samples")
        m = self.used_mask_
        try:
            self.intercept_, self.slope_ = linear_regression(np.abs(om[m]), np.abs(tau[m]) / fn[m])
        except ValueError as exc:
            raise InsufficientDataError(f"insufficient rotation: {exc}") from None
        self.r_ = self.intercept_ / self.mu_c
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "r_")
        return self.intercept_ + self.slope_ * np.abs(np.asarray(X, dtype=float).ravel())


def estimate_friction(log):
    """Return ``(mu_c, mu_s, mu_v)`` for one finger's linear-slide log."""
    est = FrictionEstimator().fit(log.features)
    return est.mu_c_, est.mu_s_, est.mu_v_


def estimate_radius(log, mu_c):
    """Return the rim radius (m) for one finger's spin log."""
    return ContactRadiusEstimator(mu_c=mu_c).fit(log.features).r_


@dataclass(frozen=True, slots=True)
class ContactEstimate:
    mu_c: float
    mu_s: float
    mu_v: float
    r: float
    r_reliable: bool = True

    def to_contact_params(self, v_s=2e-3, r_fallback=6e-3):
        """ContactParams usable by the controllers.

        Degenerate estimates are nudged into the valid domain: a non-positive
        Coulomb coefficient becomes 1e-6 and an unreliable radius is replaced
        by ``r_fallback``.
        """
        mu_c = self.mu_c if self.mu_c > 0 else 1e-6
        mu_s = max(self.mu_s, mu_c)
        r = self.r if self.r_reliable else r_fallback
        return ContactParams(mu_s=mu_s, mu_c=mu_c, mu_v=self.mu_v, v_s=v_s, r=r)


def estimate_contact(linear_log, rotation_log):
    """Run both identifications for one finger and flag a doubtful radius."""
    mu_c, mu_s, mu_v = estimate_friction(linear_log)
    if mu_c < MU_C_RELIABLE:
        return ContactEstimate(mu_c, mu_s, mu_v, float("nan"), False)
    try:
        r = estimate_radius(rotation_log, mu_c)
    except InsufficientDataError:
        return ContactEstimate(mu_c, mu_s, mu_v, float("nan"), False)
    return ContactEstimate(mu_c, mu_s, mu_v, r, r > 0)
