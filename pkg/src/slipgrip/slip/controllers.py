"""Outer-loop slip-aware controllers.

All four controllers turn averaged finger sensing into a desired grasp force
``f_d`` for the inner loop. Sensed quantities are averages of the two fingers
expressed in the middle frame of the gripper.
"""

import math
from dataclasses import dataclass, replace

from ..sensors.ft import finger_to_middle
from ..sim.contact import PlanarVelocity, PlanarWrench
from .trajectory import trapezoid

EPS = 1e-5
#: Acceleration below which the slip-force estimates are refreshed.
HOLD_ACCEL = 0.1
#: Fraction of cruise speed below which the object counts as not approaching.
APPROACH_FRACTION = 0.1
APPROACH_WINDOW = 0.25


@dataclass(frozen=True, slots=True)
class SlipGains:
    gamma_s: float = 2.0
    gamma_h: float = 1.4
    alpha: float = 0.95
    alpha_s: float = 0.95
    f_n_min: float = 0.9
    f_n_s_min: float = 2.0
    k_P_v: float = 2.0
    k_P_omega: float = 2.0
    k_P_l: float = 50.0
    k_P_tau: float = 2.0
    k_I_l: float = 1000.0
    k_I_tau: float = 40.0
    k_D_l: float = 0.1
    k_D_tau: float = 0.05
    k_P_s: float = 100.0
    k_P_h: float = 100.0
    t_h: float = 84 / 10000
    f_max: float = 45.0

    def __post_init__(self):
        for name in self.__slots__:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not (self.alpha < 1 and self.alpha_s < 1):
            raise ValueError("alpha and alpha_s must be below 1")
        if not self.t_h > 0:
            raise ValueError("t_h must be positive")


@dataclass(frozen=True, slots=True)
class AveragedSensing:
    wrench_bar: PlanarWrench
    v_bar: PlanarVelocity
    mu_c_bar: float
    r_bar: float
    f_n_bar: float = 0.0

    @property
    def f_t(self):
        return math.hypot(self.wrench_bar.fx, self.wrench_bar.fy)

    @property
    def v_t(self):
        return math.hypot(self.v_bar.vx, self.v_bar.vy)

    @property
    def limit_norm(self):
        w = self.wrench_bar
        return math.sqrt(w.fx ** 2 + w.fy ** 2 + (w.tau / self.r_bar) ** 2)


def average_sensing(ft, velocities, mu_c, r):
    """Average per-finger readings (each in its own sensor frame).

    ``ft`` is a pair of :class:`FTReading`, ``velocities`` a pair of
    :class:`PlanarVelocity`; ``mu_c`` and ``r`` the per-finger estimates.
    """
    w = [finger_to_middle(i, ft[i].wrench) for i in (0, 1)]
    v = [finger_to_middle(i, velocities[i]) for i in (0, 1)]
    return AveragedSensing(
        PlanarWrench(0.5 * (w[0].fx + w[1].fx), 0.5 * (w[0].fy + w[1].fy),
                     0.5 * (w[0].tau + w[1].tau)),
        PlanarVelocity(0.5 * (v[0].vx + v[1].vx), 0.5 * (v[0].vy + v[1].vy),
                       0.5 * (v[0].omega + v[1].omega)),
        0.5 * (mu_c[0] + mu_c[1]),
        0.5 * (r[0] + r[1]),
        0.5 * (ft[0].f_n + ft[1].f_n),
    )


def torque_holding_force(s):
    """Normal force that puts the measured torque on the limit surface."""
    tau = abs(s.wrench_bar.tau)
    gamma_tau = (tau / s.r_bar + EPS) / (s.limit_norm + EPS)
    return tau / (s.mu_c_bar * s.r_bar * gamma_tau)


def avoidance_force(s, gains):
    """Unfiltered slip-avoidance grasp force ``f_nc``."""
    f_t = s.f_t
    gamma_t = (f_t + EPS) / (s.limit_norm + EPS)
    f_t_min = f_t / (s.mu_c_bar * gamma_t)
    f_tau_min = torque_holding_force(s)
    v = s.v_bar
    slip = math.sqrt(v.vx ** 2 + v.vy ** 2 + (s.r_bar * v.omega) ** 2)
    return gains.gamma_s * max(f_t_min, f_tau_min, gains.f_n_s_min) + gains.k_P_s * slip


def decay_filter(f_nc, f_d_prev, alpha_s):
    """Rise instantly, decay geometrically."""
    if f_nc > f_d_prev:
        return f_nc
    return alpha_s * f_d_prev + (1.0 - alpha_s) * f_nc


def limited_avoidance_force(s, gains):
    """``f_nc`` capped at the gripper's maximum grasp force."""
    return min(avoidance_force(s, gains), gains.f_max)


def slip_avoidance_update(s, gains, f_d_prev):
    return decay_filter(limited_avoidance_force(s, gains), f_d_prev, gains.alpha_s)


def hinge_update(s, gains):
    f_nc = gains.gamma_h * s.f_t / s.mu_c_bar + gains.k_P_h * s.v_t
    return min(max(f_nc, gains.f_n_min), gains.f_max)


@dataclass(frozen=True, slots=True)
class SlipCtrlState:
    """Trajectory-following state for the linear and rotational controllers.

    ``disp`` is the integrated slip (m or rad), ``f_hold`` the slip-sustaining
    force estimate (``f_s`` or ``f_tau``), ``rate_prev``/``signed_prev`` the last
    speed samples used by the backward-Euler derivatives, and ``slow_time`` how
    long the object has been moving slower than the approach threshold.
    """

    mode: str
    t: float = 0.0
    disp: float = 0.0
    integral: float = 0.0
    f_hold: float = 0.0
    rate_prev: float = 0.0
    signed_prev: float = 0.0
    slow_time: float = 0.0
    f_nc: float = 0.0
    f_d: float = 0.0


def enter_linear(s):
    return SlipCtrlState("linear", f_hold=s.f_t / s.mu_c_bar, rate_prev=s.v_t,
                         signed_prev=s.v_t)


def enter_rotational(s):
    w = abs(s.v_bar.omega)
    return SlipCtrlState("rotational", f_hold=torque_holding_force(s), rate_prev=w,
                         signed_prev=s.v_bar.omega)


def _clamp_integral(base, integral, e, k_I, t_h, f_max):
    """Conditional integration keeping ``base - k_I * integral`` in [0, f_max].

    The error is not integrated while the output is saturated and the error
    would drive it further into saturation.
    """
    candidate = integral + e * t_h
    f_nc = base - k_I * candidate
    if (f_nc < 0.0 and e > 0.0) or (f_nc > f_max and e < 0.0):
        candidate = integral
        f_nc = base - k_I * candidate
    return min(max(f_nc, 0.0), f_max), candidate


def _slow_time(state, rate, traj, t_h):
    if rate < APPROACH_FRACTION * abs(traj.cruise_velocity):
        return state.slow_time + t_h
    return 0.0


def linear_slip_update(s, gains, traj, state):
    """Track a linear slip trajectory. Returns ``(f_d, new_state)``."""
    t_h = gains.t_h
    v_t = s.v_t
    t = state.t + t_h
    p = state.disp + v_t * t_h
    accel = (v_t - state.rate_prev) / t_h
    f_s = state.f_hold
    if accel < HOLD_ACCEL:
        f_s = gains.alpha * f_s + (1.0 - gains.alpha) * s.f_t / s.mu_c_bar
    p_d, v_d = trapezoid(traj, t)
    p_d, v_d = abs(p_d), abs(v_d)
    v_c = v_d + gains.k_P_v * (p_d - p)
    e = v_c - v_t
    base = f_s - gains.k_P_l * f_s * e + gains.k_D_l * f_s * accel
    f_nc, integral = _clamp_integral(base, state.integral, e, gains.k_I_l, t_h, gains.f_max)
    f_d = max(f_nc, gains.f_n_min)
    new = replace(state, t=t, disp=p, integral=integral, f_hold=f_s, rate_prev=v_t,
                  signed_prev=v_t, slow_time=_slow_time(state, v_t, traj, t_h),
                  f_nc=f_nc, f_d=f_d)
    return f_d, new


def rotational_slip_update(s, gains, traj, state):
    """Track a rotational slip trajectory. Returns ``(f_d, new_state)``."""
    t_h = gains.t_h
    w_signed = s.v_bar.omega
    w_a = abs(w_signed)
    t = state.t + t_h
    theta = state.disp + w_a * t_h
    accel_a = (w_a - state.rate_prev) / t_h
    accel_signed = (w_signed - state.signed_prev) / t_h
    f_tau = state.f_hold
    if abs(accel_signed) < HOLD_ACCEL:
        f_tau = gains.alpha * f_tau + (1.0 - gains.alpha) * torque_holding_force(s)
    th_d, w_d = trapezoid(traj, t)
    th_d, w_d = abs(th_d), abs(w_d)
    w_c = w_d + gains.k_P_omega * (th_d - theta)
    e = w_c - w_a
    base = f_tau - gains.k_P_tau * f_tau * e + gains.k_D_tau * f_tau * accel_a
    f_nc, integral = _clamp_integral(base, state.integral, e, gains.k_I_tau, t_h, gains.f_max)
    f_d = max(f_nc, s.f_t / s.mu_c_bar, gains.f_n_min)
    new = replace(state, t=t, disp=theta, integral=integral, f_hold=f_tau,
                  rate_prev=w_a, signed_prev=w_signed,
                  slow_time=_slow_time(state, w_a, traj, t_h), f_nc=f_nc, f_d=f_d)
    return f_d, new


def mode_switch(state, traj, window=APPROACH_WINDOW):
    """Next mode: trajectory modes hand over to slip avoidance when done.

    Done means the target displacement is reached, or the trajectory time has
    run out and the object has not been approaching the target for ``window``
    seconds. Hinge and avoidance persist until commanded otherwise.
    """
    if state.mode not in ("linear", "rotational"):
        return state.mode
    if state.disp >= abs(traj.target):
        return "avoidance"
    if state.t > traj.duration and state.slow_time >= window:
        return "avoidance"
    return state.mode
