"""Stick-slip dynamics of an object held between two planar contacts.

Coordinates are relative to the gripper: ``(px, py)`` is the object's slip
displacement in the contact plane (``x`` points along gravity when the gripper
is upright) and ``theta`` its in-hand rotation about the grasp axis. The
caller supplies the total non-friction load (gravity, disturbances, inertial
terms from arm motion) as a :class:`PlanarWrench` in the same frame.
"""

import math
from dataclasses import dataclass

from .contact import PlanarVelocity, PlanarWrench, friction_coefficient, slip_speed

GRAVITY = 9.81

#: Which of (x, y, theta) are free to slip in each mode.
MODES = {
    "linear": (True, False, False),
    "rotational": (False, False, True),
    "planar": (True, True, True),
}


@dataclass(frozen=True, slots=True)
class ObjectParams:
    mass: float = 0.1
    inertia_grasp: float = 3e-4
    cog_offset: float = 0.05
    width: float = 0.06

    def __post_init__(self):
        if not (self.mass > 0 and self.inertia_grasp > 0):
            raise ValueError("mass and inertia_grasp must be positive")
        if self.cog_offset < 0:
            raise ValueError("cog_offset must be non-negative")


@dataclass(frozen=True, slots=True)
class ObjectState:
    px: float = 0.0
    py: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    theta: float = 0.0
    omega: float = 0.0
    stuck_linear: bool = True
    stuck_rot: bool = True

    def __post_init__(self):
        if self.stuck_linear and (self.vx != 0.0 or self.vy != 0.0):
            raise ValueError("stuck_linear requires zero linear velocity")
        if self.stuck_rot and self.omega != 0.0:
            raise ValueError("stuck_rot requires zero angular velocity")

    @property
    def p(self):
        """Linear slip displacement along the gripper x axis."""
        return self.px

    @property
    def v(self):
        return self.vx

    @property
    def stuck(self):
        return self.stuck_linear and self.stuck_rot

    @property
    def velocity(self):
        return PlanarVelocity(self.vx, self.vy, self.omega)


def gravity_load(op, cog_angle, gripper_angle=0.0, g=GRAVITY):
    """Gravity wrench on the object expressed in the gripper frame.

    ``cog_angle`` is the world angle of the grasp-point-to-CoG vector measured
    from straight down; ``gripper_angle`` the gripper's roll about the grasp
    axis. The torque restores the CoG towards hanging below the grasp point.
    """
    w = op.mass * g
    c, s = math.cos(gripper_angle), math.sin(gripper_angle)
    return PlanarWrench(w * c, -w * s, -w * op.cog_offset * math.sin(cog_angle))


def _static_ok(qx, qy, qt, f_n, cps, kinetic_speed=None):
    """Whether both contacts can hold the load ``q`` shared equally.

    With ``kinetic_speed`` the capacity uses the friction coefficient at that
    slip speed instead of the static one.
    """
    for fn, cp in zip(f_n, cps):
        need = 0.5 * math.sqrt(qx * qx + qy * qy + (qt / cp.r) ** 2)
        mu = cp.mu_s if kinetic_speed is None else friction_coefficient(kinetic_speed, cp)
        if need > mu * fn:
            return False
    return True


#: Reweighting iterations and relative tolerance of the implicit friction solve.
MAX_ITER = 60
REL_TOL = 1e-12


def _implicit_slide(u, inv_m, f_n, cps, dt, fixed_omega):
    """Backward-Euler velocity with friction evaluated at the end of the step.

    Solves ``v = u + dt * inv_m * F(v)`` with the ellipsoidal sliding friction
    ``F(v) = -sum_c mu(s_c) f_c S_c^2 v / s_c`` by iterative reweighting.
    ``inv_m`` is zero for components that are not integrated. With
    ``fixed_omega`` the spin is imposed and only the linear part is solved.
    """
    ux, uy, ut = u
    vx, vy, vt = u
    if fixed_omega is not None:
        vt = fixed_omega
    gains = []
    for _ in range(MAX_ITER):
        kx = ky = kt = 0.0
        gains = []
        for fn, cp in zip(f_n, cps):
            r2 = cp.r * cp.r
            s = math.sqrt(vx * vx + vy * vy + r2 * vt * vt)
            if s == 0.0:
                return (0.0, 0.0, 0.0 if fixed_omega is None else fixed_omega), None
            k = friction_coefficient(s, cp) * fn / s
            gains.append(k)
            kx += k
            kt += k * r2
        ky = kx
        nx = ux / (1.0 + dt * inv_m[0] * kx)
        ny = uy / (1.0 + dt * inv_m[1] * ky)
        nt = vt if fixed_omega is not None else ut / (1.0 + dt * inv_m[2] * kt)
        delta = abs(nx - vx) + abs(ny - vy) + abs(nt - vt) * 0.01
        scale = abs(nx) + abs(ny) + abs(nt) * 0.01 + 1e-300
        vx, vy, vt = nx, ny, nt
        if delta <= REL_TOL * scale:
            break
    # Friction consistent with the returned velocity.
    fric = []
    for fn, cp in zip(f_n, cps):
        r2 = cp.r * cp.r
        s = math.sqrt(vx * vx + vy * vy + r2 * vt * vt)
        k = friction_coefficient(s, cp) * fn / s if s > 0.0 else 0.0
        fric.append(PlanarWrench(-k * vx, -k * vy, -k * r2 * vt))
    return (vx, vy, vt), fric


def step_object(obj, op, f_n, cps, applied, mode="planar", dt=1e-4, prescribed_omega=None):
    """Advance the object by one step.

    Sliding friction is integrated implicitly: the friction wrench opposes the
    velocity at the end of the step, which keeps the strongly damped directions
    of the limit surface (linear drift during spin) stable at any step size.

    Parameters
    ----------
    f_n, cps : pairs
        Normal force and contact parameters for each finger.
    applied : PlanarWrench
        Net non-friction load on the object.
    mode : {"linear", "rotational", "planar"}
        Free slip directions; locked directions are held by an external
        constraint and their load does not reach the contacts.
    prescribed_omega : float, optional
        Kinematically imposed relative spin (object held by a support while the
        gripper rotates). Overrides the rotational dynamics.

    Returns
    -------
    state : ObjectState
    friction : tuple of PlanarWrench
        Friction wrench each finger applies to the object.
    """
    free_x, free_y, free_t = MODES[mode]
    qx = applied.fx if free_x else 0.0
    qy = applied.fy if free_y else 0.0
    qt = applied.tau if free_t else 0.0
    vx = obj.vx if free_x else 0.0
    vy = obj.vy if free_y else 0.0
    om = obj.omega if free_t else 0.0
    if prescribed_omega is not None:
        free_t = False
        qt = 0.0
        om = prescribed_omega
    m, inertia = op.mass, op.inertia_grasp

    if prescribed_omega is None or prescribed_omega == 0.0:
        # Load needed to bring the object to rest within this step.
        wx = qx + m * vx / dt
        wy = qy + m * vy / dt
        wt = qt + inertia * om / dt
        moving = vx != 0.0 or vy != 0.0 or om != 0.0
        if moving:
            s_now = max(slip_speed(PlanarVelocity(vx, vy, om), cp.r) for cp in cps)
            stops = _static_ok(wx, wy, wt, f_n, cps, kinetic_speed=s_now)
        else:
            stops = _static_ok(qx, qy, qt, f_n, cps)
        if stops:
            if moving:
                hold = PlanarWrench(-0.5 * wx, -0.5 * wy, -0.5 * wt)
            else:
                hold = PlanarWrench(-0.5 * qx, -0.5 * qy, -0.5 * qt)
            state = ObjectState(obj.px, obj.py, 0.0, 0.0, obj.theta, 0.0, True, True)
            return state, (hold, hold)

    inv_m = (1.0 / m if free_x else 0.0, 1.0 / m if free_y else 0.0,
             1.0 / inertia if free_t else 0.0)
    u = (vx + dt * qx * inv_m[0], vy + dt * qy * inv_m[1], om + dt * qt * inv_m[2])
    (nvx, nvy, nom), fric = _implicit_slide(u, inv_m, f_n, cps, dt, prescribed_omega)
    if fric is None:
        fric = [PlanarWrench(), PlanarWrench()]
    lin_locked = not (free_x or free_y)
    rot_locked = not free_t and prescribed_omega is None
    lin_rest = nvx == 0.0 and nvy == 0.0
    state = ObjectState(
        obj.px + dt * nvx, obj.py + dt * nvy,
        nvx, nvy,
        obj.theta + dt * nom, nom,
        lin_locked and lin_rest,
        rot_locked and nom == 0.0,
    )
    return state, (fric[0], fric[1])
