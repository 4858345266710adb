from .controllers import (
    AveragedSensing,
    SlipCtrlState,
    SlipGains,
    average_sensing,
    avoidance_force,
    decay_filter,
    enter_linear,
    enter_rotational,
    hinge_update,
    limited_avoidance_force,
    linear_slip_update,
    mode_switch,
    rotational_slip_update,
    slip_avoidance_update,
    torque_holding_force,
)
from .trajectory import TrajectorySpec, trapezoid
