from .contact import (
    ContactParams,
    PlanarVelocity,
    PlanarWrench,
    friction_coefficient,
    friction_wrench,
    inside_static_surface,
    limit_surface_norm,
    slip_speed,
)
from .gripper import (
    GripperParams,
    GripperState,
    equilibrium_state,
    lyapunov_value,
    measured_normal_force,
    step_gripper,
)
from .objects import GRAVITY, ObjectParams, ObjectState, gravity_load, step_object

__all__ = [
    "ContactParams", "PlanarVelocity", "PlanarWrench", "friction_coefficient",
    "friction_wrench", "inside_static_surface", "limit_surface_norm", "slip_speed",
    "GripperParams", "GripperState", "equilibrium_state", "lyapunov_value",
    "measured_normal_force", "step_gripper",
    "GRAVITY", "ObjectParams", "ObjectState", "gravity_load", "step_object",
]
