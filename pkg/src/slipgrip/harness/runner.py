"""Deterministic multi-rate scenario runner.

Every physics tick advances the gripper and the object; every
``inner_divisor`` ticks the grasp force controller runs, and every
``outer_divisor`` ticks the sensors are sampled and the slip-aware
controller updates the desired force. Everything random draws from one
generator seeded by the scenario.
"""

import math
from dataclasses import replace

import numpy as np

from ..estimation.core import LOG_COLUMNS, ContactSampleLog, estimate_contact
from ..exceptions import ConfigError, InsufficientDataError
from ..grasp import GraspForceController
from ..sensors.ft import finger_to_middle, middle_to_finger, simulate_ft_reading
from ..sensors.optical import SensorLayout, calibrate_reading, fuse, simulate_optical_reading
from ..sim.contact import PlanarVelocity, PlanarWrench
from ..sim.gripper import GripperState, equilibrium_state, measured_normal_force, step_gripper
from ..sim.objects import ObjectState, gravity_load, step_object
from ..slip.controllers import (
    average_sensing,
    enter_linear,
    enter_rotational,
    hinge_update,
    limited_avoidance_force,
    linear_slip_update,
    mode_switch,
    rotational_slip_update,
    slip_avoidance_update,
)
from ..slip.trajectory import TrajectorySpec, trapezoid
from .presets import SURFACE_PRESETS
from .scenario import ArmMove
from .trace import COLUMNS, MODE_CODES, Trace

#: Normal force above which the object counts as grasped.
GRASPED_FORCE = 1.0


def _trap_state(move, t):
    """Position, velocity and acceleration of one arm move at time ``t``."""
    tau = t - move.t
    if tau <= 0.0:
        return 0.0, 0.0, 0.0
    spec = TrajectorySpec(move.amount, move.duration)
    pos, vel = trapezoid(spec, tau)
    third = move.duration / 3.0
    if tau >= move.duration:
        acc = 0.0
    elif tau < third:
        acc = spec.cruise_velocity / third
    elif tau < 2.0 * third:
        acc = 0.0
    else:
        acc = -spec.cruise_velocity / third
    if tau >= move.duration:
        vel = 0.0
    return pos, vel, acc


class _Arm:
    def __init__(self, moves, psi0):
        self.moves = list(moves)
        self.psi0 = psi0

    def add(self, move):
        self.moves.append(move)

    def state(self, t):
        z = dz = ddz = 0.0
        psi, dpsi, ddpsi = self.psi0, 0.0, 0.0
        for m in self.moves:
            if t <= m.t:
                continue
            p, v, a = _trap_state(m, t)
            if m.kind == "translate":
                z += p
                dz += v
                ddz += a
            else:
                psi += p
                dpsi += v
                ddpsi += a
        return z, dz, ddz, psi, dpsi, ddpsi


class World:
    """Mutable simulation state for one scenario run."""

    def __init__(self, sc):
        self.sc = sc
        preset = sc.preset
        self.op = preset.object_params()
        try:
            self.gp = preset.gripper_params(**sc.gripper)
        except (TypeError, ValueError) as exc:
            raise ConfigError("gripper", str(exc)) from None
        self.cps = tuple(sc.true_contacts)
        self.est = list(sc.controller_estimates)
        self.rng = np.random.default_rng(sc.seed)
        self.dt = sc.rates.dt
        self.t_h = sc.rates.outer_divisor * self.dt
        self.gains = sc.outer_gains
        self.arm = _Arm(sc.arm, sc.gripper_angle)
        self._arm_cache = (None, None)

        if sc.initial_force > 0:
            self.g = equilibrium_state(self.gp, sc.initial_force, sc.delta)
        else:
            self.g = GripperState()
        self.obj = ObjectState()
        self.grasp = GraspForceController(sc.grasp_gains, self.gp.k_f)
        self.f_d = sc.initial_force
        self.f_c, self.v_t, self.f_app = 0.0, 0.0, 0.0
        self.fric = (PlanarWrench(), PlanarWrench())
        self.f_support = 0.0

        # Support floor placed so that it carries the object's weight at rest.
        w = self.op.mass * sc.gravity * math.cos(sc.gripper_angle)
        self.z_floor = -w / sc.support.stiffness if sc.support.enabled else None

        # Outer loop and sensing.
        self.mode = "idle"
        self.cmd = None
        self.pending = list(sc.commands)
        self.entry_due = False
        self.slip_state = None
        self.traj = None
        self.f_nc = 0.0
        self.layout = SensorLayout(sc.sensing.d)
        self.distortion = SURFACE_PRESETS[sc.sensing.surface]
        self.opt_residual = [None, None]
        self.extra_mass = 0.0
        self.window_start = (0.0, 0.0, 0.0)
        self.sensing = None
        self.p_est = 0.0
        self.theta_est = 0.0
        self.rejected = [None, None]
        self.explore = None

        self.held = sc.initial_force > 0
        self.dropped = False
        self.events = []
        self.inner_count = 0
        self.outer_count = 0

    # -- helpers ---------------------------------------------------------
    def event(self, t, kind, **detail):
        self.events.append({"t": t, "kind": kind, **detail})

    def _set_mode(self, t, mode, reason):
        if mode != self.mode:
            self.event(t, "mode_switch", frm=self.mode, to=mode, reason=reason)
            self.mode = mode

    def _applied_load(self, t, arm):
        sc, op = self.sc, self.op
        z, dz, ddz, psi, dpsi, ddpsi = arm
        c, s = math.cos(psi), math.sin(psi)
        grav = gravity_load(op, sc.cog_angle + psi + self.obj.theta, psi, sc.gravity)
        fx, fy, tau = grav.fx, grav.fy, grav.tau - op.inertia_grasp * ddpsi
        extra = 0.0
        for d in sc.disturbances:
            k = d.load(t)
            if k:
                fx += k * (c * d.fx + s * d.fy)
                fy += k * (-s * d.fx + c * d.fy)
                tau += k * d.tau
                extra += d.mass
        m = op.mass + extra
        fx -= m * ddz * c
        fy += m * ddz * s
        self.extra_mass = extra
        prescribed = None
        self.f_support = 0.0
        if self.z_floor is not None:
            o = self.obj
            pen = z + c * o.px - s * o.py - self.z_floor
            if pen > 0.0:
                rate = dz + c * o.vx - s * o.vy
                f = sc.support.stiffness * pen + sc.support.damping * rate
                if f > 0.0:
                    self.f_support = f
                    fx -= c * f
                    fy += s * f
                prescribed = -dpsi
        return PlanarWrench(fx, fy, tau), prescribed

    # -- commands ----------------------------------------------------------
    def _activate(self, t, cmd):
        self.cmd = cmd
        self.event(t, "command", mode=cmd.mode)
        if cmd.mode == "explore":
            self._start_explore(t)
            self._set_mode(t, "explore", "command")
            return
        self._set_mode(t, cmd.mode, "command")
        if cmd.mode in ("linear", "rotational"):
            self.traj = TrajectorySpec(cmd.target, cmd.duration)
            self.entry_due = True

    def _start_explore(self, t):
        cfg = self.sc.exploration
        t_slide = t + cfg.t1
        t_rot = t_slide + cfg.t2
        self.arm.add(ArmMove(t_slide, "translate", cfg.d_e, cfg.t2))
        self.arm.add(ArmMove(t_rot, "rotate", cfg.theta_e, cfg.t_theta))
        self.arm.add(ArmMove(t_rot + cfg.t_theta, "rotate", -cfg.theta_e, cfg.t_theta))
        self.explore = {"t0": t, "t_rot": t_rot, "end": t_rot + 2.0 * cfg.t_theta,
                        "rows": []}

    def _finish_explore(self, t):
        rows = np.array(self.explore["rows"]).reshape(-1, len(LOG_COLUMNS))
        log = ContactSampleLog(rows)
        t_rot = self.explore["t_rot"]
        results = []
        for i in (0, 1):
            flog = log.for_finger(i)
            lin = ContactSampleLog(flog.data[flog.t <= t_rot])
            rot = ContactSampleLog(flog.data[flog.t > t_rot])
            try:
                est = estimate_contact(lin, rot)
            except InsufficientDataError as exc:
                self.event(t, "estimate_failed", finger=i, reason=str(exc))
                results.append(None)
                continue
            self.est[i] = est.to_contact_params(r_fallback=self.est[i].r)
            results.append(est)
            self.event(t, "estimate", finger=i, mu_c=est.mu_c, mu_s=est.mu_s,
                       mu_v=est.mu_v, r=est.r, r_reliable=est.r_reliable)
        self.explore_result = results
        self.explore_log = log
        self.explore = None
        self.cmd = None
        self._set_mode(t, "avoidance", "exploration done")

    def _force_setpoint(self, t):
        cmd = self.cmd
        if self.mode == "force":
            if cmd.profile == "sine":
                return cmd.f_d + cmd.amplitude * math.sin(2.0 * math.pi * cmd.freq * (t - cmd.t))
            return cmd.f_d
        if self.mode == "explore":
            return self.sc.exploration.f_g
        return self.f_d

    # -- sensing and outer loop ----------------------------------------
    def _sense(self, t):
        sc = self.sc
        T = self.t_h
        o = self.obj
        p0, q0, th0 = self.window_start
        v_true = PlanarVelocity((o.px - p0) / T, (o.py - q0) / T, (o.theta - th0) / T)
        self.window_start = (o.px, o.py, o.theta)
        f_n = measured_normal_force(self.g, self.gp)
        readings, velocities = [], []
        for i in (0, 1):
            on_finger = middle_to_finger(i, -self.fric[i])
            readings.append(simulate_ft_reading(on_finger, f_n, self.rng,
                                                sc.sensing.force_noise, sc.sensing.torque_noise))
            dropout = [any(d.finger == i and d.sensor == j and d.t_start <= t < d.t_end
                           for d in sc.sensing.dropouts) for j in range(3)]
            raw = simulate_optical_reading(
                middle_to_finger(i, v_true), self.layout, self.distortion, sc.sensing.cpi,
                T, dropout, self.rng, residual=self.opt_residual[i],
                attenuation=sc.sensing.attenuation, quantize=sc.sensing.quantize)
            self.opt_residual[i] = raw.residual
            res = fuse(calibrate_reading(raw, self.distortion), self.layout)
            if res.rejected != self.rejected[i]:
                self.event(t, "rejection", finger=i, sensor=res.rejected)
                self.rejected[i] = res.rejected
            velocities.append(res.velocity)
        s = average_sensing(readings, velocities, [c.mu_c for c in self.est],
                            [c.r for c in self.est])
        self.sensing = s
        self.p_est += s.v_bar.vx * T
        self.theta_est += s.v_bar.omega * T
        if self.explore is not None:
            for i in (0, 1):
                w, v = readings[i].wrench, velocities[i]
                self.explore["rows"].append((t, w.fx, w.fy, w.tau, readings[i].f_n,
                                             v.vx, v.vy, v.omega, i))
        return s

    def _outer(self, t):
        s = self._sense(t)
        g = self.gains
        mode = self.mode
        if mode == "avoidance":
            self.f_nc = limited_avoidance_force(s, g)
            self.f_d = slip_avoidance_update(s, g, self.f_d)
        elif mode == "hinge":
            self.f_d = hinge_update(s, g)
            self.f_nc = self.f_d
        elif mode in ("linear", "rotational"):
            if self.entry_due:
                self.slip_state = enter_linear(s) if mode == "linear" else enter_rotational(s)
                self.entry_due = False
                self.p_est = 0.0
                self.theta_est = 0.0
            update = linear_slip_update if mode == "linear" else rotational_slip_update
            self.f_d, self.slip_state = update(s, g, self.traj, self.slip_state)
            self.f_nc = self.slip_state.f_nc
            nxt = mode_switch(self.slip_state, self.traj)
            if nxt != mode:
                reason = "target reached" if self.slip_state.disp >= self.traj.target else "timeout"
                self._set_mode(t, nxt, reason)
        if self.explore is not None and t >= self.explore["end"] - 1e-12:
            self._finish_explore(t)

    # -- main loop -------------------------------------------------------
    def _inner(self, t):
        while self.pending and self.pending[0].t <= t + 1e-12:
            self._activate(t, self.pending.pop(0))
        if self.mode in ("force", "explore", "idle"):
            self.f_d = self._force_setpoint(t)
        f_n = measured_normal_force(self.g, self.gp)
        self.f_c, self.v_t, self.f_app = self.grasp.update(self.f_d, f_n)
        self.inner_count += 1

    def _arm_state(self, t):
        if self._arm_cache[0] != t:
            self._arm_cache = (t, self.arm.state(t))
        return self._arm_cache[1]

    def _physics(self, t):
        arm = self._arm_state(t)
        load, prescribed = self._applied_load(t, arm)
        f_n = measured_normal_force(self.g, self.gp)
        was_stuck = self.obj.stuck
        op = self.op
        if self.extra_mass:
            op = replace(op, mass=op.mass + self.extra_mass)
        self.obj, self.fric = step_object(self.obj, op, (f_n, f_n), self.cps, load,
                                          self.sc.mode, self.dt, prescribed)
        self.g = step_gripper(self.g, self.gp, self.f_app, self.sc.delta, self.dt)
        t1 = t + self.dt
        if self.obj.stuck != was_stuck:
            self.event(t1, "stick" if self.obj.stuck else "slip")
        # Separation means the fingers physically left the object surface.
        if self.g.x2 > 0.0:
            if not self.held and measured_normal_force(self.g, self.gp) > GRASPED_FORCE:
                self.held = True
        elif self.held:
            self.held = False
            self.event(t1, "separation")
        if not self.dropped and abs(self.obj.px) > self.sc.drop_distance:
            self.dropped = True
            self.event(t1, "drop")

    def row(self, t):
        g, o, s = self.g, self.obj, self.sensing
        arm = self._arm_state(t)
        if s is None:
            sb = (0.0,) * 7
        else:
            sb = (s.wrench_bar.fx, s.wrench_bar.fy, s.wrench_bar.tau, s.f_n_bar,
                  s.v_bar.vx, s.v_bar.vy, s.v_bar.omega)
        f0, f1 = self.fric
        return (t, self.f_d, self.f_c, self.v_t, measured_normal_force(g, self.gp),
                g.x1, g.v1, g.x2, g.v2,
                o.px, o.py, o.theta, o.vx, o.vy, o.omega, float(o.stuck),
                arm[0], arm[3]) + sb + (
                self.p_est, self.theta_est, self.f_nc, float(MODE_CODES.index(self.mode)),
                f0.fx, f0.fy, f0.tau, f1.fx, f1.fy, f1.tau, self.f_support)

    def run(self):
        sc = self.sc
        n = int(round(sc.duration * sc.rates.physics_hz))
        inner_div, outer_div, dec = sc.rates.inner_divisor, sc.rates.outer_divisor, sc.decimation
        self._inner(0.0)
        rows = [self.row(0.0)]
        for k in range(1, n + 1):
            t_prev = (k - 1) * self.dt
            self._physics(t_prev)
            t = k * self.dt
            if k % inner_div == 0:
                self._inner(t)
            if k % outer_div == 0:
                self._outer(t)
                self.outer_count += 1
            if k % dec == 0:
                rows.append(self.row(t))
        return rows


def run_scenario(scenario, return_world=False):
    """Simulate ``scenario`` and return its :class:`Trace`."""
    world = World(scenario)
    rows = world.run()

    arr = np.array(rows, dtype=float)
    trace = Trace({c: arr[:, i] for i, c in enumerate(COLUMNS)}, world.events, {
        "scenario": scenario.name,
        "object": scenario.object,
        "seed": scenario.seed,
        "physics_hz": scenario.rates.physics_hz,
        "inner_hz": scenario.rates.physics_hz / scenario.rates.inner_divisor,
        "outer_hz": scenario.rates.outer_hz,
        "outer_divisor": scenario.rates.outer_divisor,
        "outer_note": f"outer loop runs every {scenario.rates.outer_divisor} physics steps "
                      f"({scenario.rates.outer_hz:.2f} Hz) in place of 120 Hz",
        "inner_count": world.inner_count,
        "outer_count": world.outer_count,
        "decimation": scenario.decimation,
    })
    if return_world:
        return trace, world
    return trace
