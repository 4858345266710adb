"""Inner-loop grasp force controller.

Feedforward of the desired force plus a PI correction whose gains shrink with
the change in error between ticks: ``eta = gamma * de**2 + 1`` divides the
proportional gain and tightens the integral bound ``I_max / (eta * k_I)``,
which limits overshoot after set-point steps.
"""

from dataclasses import dataclass

from ._validation import check_finite, check_positive


@dataclass(frozen=True, slots=True)
class GraspGains:
    k_P: float = 2.0
    k_I: float = 100.0
    I_max: float = 10.0
    gamma: float = 5.0
    t_s_ctrl: float = 2e-3

    def __post_init__(self):
        check_positive(k_P=self.k_P, k_I=self.k_I, I_max=self.I_max,
                       gamma=self.gamma, t_s_ctrl=self.t_s_ctrl)


@dataclass(frozen=True, slots=True)
class GraspCtrlState:
    integral: float = 0.0
    prev_error: float = 0.0


def grasp_update(state, f_d, f_n, gains):
    """One controller tick. Returns ``(f_c, new_state)``."""
    check_finite(f_d=f_d, f_n=f_n)
    e = f_d - f_n
    de = e - state.prev_error
    eta = gains.gamma * de * de + 1.0
    bound = gains.I_max / (eta * gains.k_I)
    integral = state.integral + e * gains.t_s_ctrl
    if integral > bound:
        integral = bound
    elif integral < -bound:
        integral = -bound
    f_c = f_d + gains.k_P / eta * e + gains.k_I * integral
    return f_c, GraspCtrlState(integral, e)


def force_to_voltage(f_c, k_f):
    """Target motor voltage; positive opens the gripper."""
    if not k_f > 0:
        raise ValueError("k_f must be positive")
    return -f_c / k_f


def voltage_to_force(v_t, k_f):
    return -v_t * k_f


class GraspForceController:
    """Stateful wrapper holding the controller state between ticks.

    ``v_max`` is the software voltage ceiling of the motor driver.
    """

    def __init__(self, gains=None, k_f=3.9166, v_max=20.0):
        self.gains = gains or GraspGains()
        self.k_f = k_f
        self.v_max = v_max
        self.state = GraspCtrlState()

    def reset(self):
        self.state = GraspCtrlState()

    def update(self, f_d, f_n):
        """Return ``(f_c, v_t, applied_force)`` after saturation."""
        f_c, self.state = grasp_update(self.state, f_d, f_n, self.gains)
        v_t = force_to_voltage(f_c, self.k_f)
        v_t = max(-self.v_max, min(self.v_max, v_t))
        return f_c, v_t, voltage_to_force(v_t, self.k_f)
