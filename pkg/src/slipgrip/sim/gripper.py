"""Two-mass model of the gripper drive train.

The motor inertia is lumped into an equivalent linear mass ``m1`` coupled to
the finger mass ``m2`` through the transmission spring/damper ``(k1, d1)``.
The finger compresses the grasped object, which acts as the contact
spring/damper ``(k2, d2)``. ``x2`` is the compression past first contact.
"""

import math
from dataclasses import dataclass

from .._validation import check_finite, check_positive
from ..exceptions import SimulationFault


@dataclass(frozen=True, slots=True)
class GripperParams:
    m1: float = 0.3
    m2: float = 0.02
    k1: float = 2e4
    d1: float = 50.0
    k2: float = 1e4
    d2: float = 20.0
    c_v: float = 60.0
    f_f_motor: float = 0.3
    k_f: float = 3.9166

    def __post_init__(self):
        check_positive(m1=self.m1, m2=self.m2, k1=self.k1, d1=self.d1,
                       k2=self.k2, d2=self.d2, k_f=self.k_f)
        if self.c_v < 0 or self.f_f_motor < 0:
            raise ValueError("c_v and f_f_motor must be non-negative")


@dataclass(frozen=True, slots=True)
class GripperState:
    x1: float = 0.0
    v1: float = 0.0
    x2: float = 0.0
    v2: float = 0.0

    def __post_init__(self):
        if self.x2 < 0:
            raise ValueError(f"x2 must be >= 0, got {self.x2}")


def equilibrium_state(params, f_c, delta=0.0):
    """Rest state reached under a constant command ``f_c`` (and bias ``delta``)."""
    f = f_c + delta
    if f <= 0:
        return GripperState()
    return GripperState(x1=(params.k1 + params.k2) / (params.k1 * params.k2) * f,
                        x2=f / params.k2)


def step_gripper(state, params, f_c, f_ext=0.0, dt=1e-4):
    """Advance the drive train by one semi-implicit Euler step.

    ``f_ext`` is an additive force on the motor side (unmodelled disturbance,
    zero by default). Motor Coulomb friction opposes ``v1`` and is never allowed
    to reverse its sign within a step; at rest it holds up to ``f_f_motor``.
    """
    if not dt > 0:
        raise SimulationFault(f"dt must be positive, got {dt}")
    check_finite(f_c=f_c, f_ext=f_ext, x1=state.x1, v1=state.v1,
                 x2=state.x2, v2=state.v2)
    p = params
    x1, v1, x2, v2 = state.x1, state.v1, state.x2, state.v2

    f12 = p.k1 * (x1 - x2) + p.d1 * (v1 - v2)
    v1n = v1 + dt * (f_c + f_ext - p.c_v * v1 - f12) / p.m1
    dv_fric = dt * p.f_f_motor / p.m1
    if abs(v1n) <= dv_fric:
        v1n = 0.0
    else:
        v1n -= math.copysign(dv_fric, v1n)
    v2n = v2 + dt * (f12 - p.k2 * x2 - p.d2 * v2) / p.m2

    x1n = x1 + dt * v1n
    x2n = x2 + dt * v2n
    if x2n < 0.0:
        x2n = 0.0
        v2n = 0.0
    return GripperState(x1n, v1n, x2n, v2n)


def measured_normal_force(state, params):
    """Grasp force seen by the F/T sensors, clamped at zero on separation."""
    f = params.k2 * state.x2 + params.d2 * state.v2
    return f if f > 0.0 else 0.0


def lyapunov_value(state, params, f_c, delta=0.0):
    p = params
    f = f_c + delta
    return (0.5 * p.m1 * state.v1 ** 2
            + 0.5 * p.m2 * state.v2 ** 2
            + 0.5 * p.k1 * (state.x1 - state.x2 - f / p.k1) ** 2
            + 0.5 * p.k2 * (state.x2 - f / p.k2) ** 2)
